"""Unit-vector gradient and Newton extremum seeking on quadratic maps."""

from ._uvesc import (
    Error,
    NotHurwitzError,
    Scenario,
    SimulationError,
    SingularMatrixError,
    ValidationError,
    average,
    common_period,
    compare,
    decay_classifier,
    detect_sliding,
    load_scenario,
    simulate,
    solve_lyapunov,
    validate_frequencies,
)

__all__ = [
    "Error",
    "NotHurwitzError",
    "Scenario",
    "SimulationError",
    "SingularMatrixError",
    "ValidationError",
    "average",
    "common_period",
    "compare",
    "decay_classifier",
    "detect_sliding",
    "load_scenario",
    "simulate",
    "solve_lyapunov",
    "validate_frequencies",
]
