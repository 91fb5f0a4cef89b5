#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uvesc/analysis.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// T / 2000 with T the common dither period.
double default_step(const DitherSpec& spec);

/// Checks every precondition of simulate_full: map, dither and law validity, frequency
/// conditions, the Hurwitz condition for the law kind, the step size and the horizon.
void validate_config(const SimConfig& config);

struct FullRun {
  Trajectory trajectory;                 // samples up to the failure point if the run diverged
  std::optional<SimulationError> error;  // set when integration produced NaN or overflow
};

/// Forward-Euler closed loop with signals evaluated at the start of each step. Never throws
/// on divergence; validation errors still throw.
FullRun run_full(const SimConfig& config);

/// As run_full but throws SimulationError on divergence.
Trajectory simulate_full(const SimConfig& config);

enum class AverageKind { GradientAvg, NewtonAvgFull, NewtonAvgLinearized };
std::string_view to_string(AverageKind kind);

struct AverageScheme {
  AverageKind kind = AverageKind::GradientAvg;
  Vector theta_tilde0;
  Vector g_hat0;        // alternative initial condition, theta_tilde0 = H*^-1 g_hat0
  Matrix gamma_tilde0;  // Newton kinds; defaults to law.gamma0 - H*^-1
  double boundary_layer = 1e-6;  // relay v/(||v|| + eps_b); state pinned to 0 once within eps_b or one step
  double omega = 1.0;   // time-scaling frequency, tbar = omega t
  std::size_t sample_every = 1;
};

/// Integrates the averaged system in slow time. Times are recorded in original time; theta_hat = theta =
/// theta* + theta_tilde, g_hat = H* theta_tilde, u = d theta_tilde / dt, gamma = H*^-1 + Gamma_tilde.
Trajectory simulate_average(const QuadraticMap& map, const ControllerLaw& law, const AverageScheme& scheme,
                            double t_end, double dt);

/// Averaged counterpart of a full configuration (GradientAvg or NewtonAvgFull, omega = 2 pi / T).
AverageScheme average_scheme_for(const SimConfig& config);

enum class CompareMode { Full, Average };

struct CompareOptions {
  CompareMode mode = CompareMode::Full;
  double onset_fraction = 0.05;  // full mode: tol = fraction * RMS of ||Ghat|| over the first period
  /// Average mode: tol on ||theta_tilde||. Unset means one Euler step of the relay, dt * ||K||,
  /// the resolution at which the pinning rule declares arrival.
  std::optional<double> average_tol;
  double y_threshold = 1.5;
};

struct SummaryRow {
  std::string label;
  std::optional<double> onset;
  std::optional<double> time_to_y;  // first time after which |y - Q*| <= threshold holds to the end
  double final_theta_residual = 0.0;
  double final_y_residual = 0.0;
  DecayFit decay;
  std::vector<std::optional<double>> component_onsets;
  std::optional<std::string> failure;  // divergence diagnostic; remaining fields describe the partial run
};

/// Sliding-onset and residual summary of one trajectory.
SummaryRow summarize(const Trajectory& traj, const SimConfig& config, const CompareOptions& options);

/// Runs and summarizes each configuration in parallel; rows are in input order.
std::vector<SummaryRow> run_batch(const std::vector<SimConfig>& configs, const CompareOptions& options = {});

/// run_batch for configurations that share map and dither (ValidationError otherwise).
std::vector<SummaryRow> compare_schemes(const std::vector<SimConfig>& configs, const CompareOptions& options = {});

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::string& key_header = {},
                       const std::vector<double>& keys = {});

}  // namespace uvesc
