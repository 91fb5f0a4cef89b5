#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// Solves A^T P + P A = -Q through the n^2 x n^2 vectorised system. Throws NotHurwitzError
/// when P is not symmetric positive definite (this doubles as the Hurwitz test) and
/// ValidationError when Q is not symmetric positive definite.
LyapunovCertificate solve_lyapunov(const Matrix& a_matrix, const Matrix& q_matrix);

/// True iff solve_lyapunov(a, I) succeeds.
bool is_hurwitz(const Matrix& a_matrix);

/// Certificate for the averaged gradient loop, A = H* K.
LyapunovCertificate gradient_certificate(const Matrix& hessian, const Matrix& gain, const Matrix& q_matrix);
/// Certificate for the linearised averaged Newton loop, A = -K.
LyapunovCertificate newton_certificate(const Matrix& gain, const Matrix& q_matrix);

enum class BoundForm { Gradient, Newton };
enum class TimeFrame { SlowTime, OriginalTime };

/// Upper end of the settling interval.
///   slow time:                 2 w lambda_max(P) / lambda_min(Q) * initial_norm
///   original time (gradient):  2 lambda_max(P) / lambda_min(Q) * ||H*|| * initial_norm
///   original time (Newton):    2 lambda_max(P) / lambda_min(Q) * initial_norm
/// initial_norm is ||Ghat_av(0)|| for the gradient slow-time form and ||theta(0) - theta*|| otherwise.
/// h_norm is required for the gradient original-time form.
double settling_bound(const LyapunovCertificate& cert, BoundForm form, double initial_norm, double omega,
                      TimeFrame frame, std::optional<double> h_norm = std::nullopt);

enum class SignalKind { GHat, ThetaTilde };

/// Per-sample Euclidean norm of the chosen series. theta_star is required for ThetaTilde.
Vector signal_norms(const Trajectory& traj, SignalKind signal, std::span<const double> theta_star = {});

/// Per-sample |component| of the chosen series.
Vector signal_component(const Trajectory& traj, SignalKind signal, std::size_t component,
                        std::span<const double> theta_star = {});

/// Earliest sample time t such that the moving RMS of values over [t, t + window] stays <= tol
/// for every full window up to the end of the series. nullopt if the last full window exceeds tol.
std::optional<double> detect_sliding(std::span<const double> times, std::span<const double> values, double tol,
                                     double window);

std::optional<double> detect_sliding(const Trajectory& traj, SignalKind signal, double tol, double window,
                                     std::span<const double> theta_star = {});

enum class DecayClass { FiniteTimeLinear, Exponential, Inconclusive };
std::string_view to_string(DecayClass c);

struct DecayFit {
  DecayClass classification = DecayClass::Inconclusive;
  double linear_rms = 0.0;       // residual of s ~ c0 + c1 t
  double exponential_rms = 0.0;  // residual of s ~ exp(c0 - rate t), fitted on log s
  double slope = 0.0;
  double rate = 0.0;
  std::size_t samples = 0;       // length of the pre-onset segment used
  double segment_end = 0.0;
};

/// Fits both decay laws on the pre-onset segment (samples while s > 1e-3 s(0)) and picks the one
/// whose RMS residual is at least 2x smaller. Flat signals, segments spanning less than one
/// decade and close calls are Inconclusive.
DecayFit decay_classifier(std::span<const double> times, std::span<const double> values);

DecayFit decay_classifier(const Trajectory& traj, SignalKind signal, std::span<const double> theta_star = {});

struct ResidualBounds {
  double theta_residual = 0.0;  // ||a||
  double y_residual = 0.0;      // max over one period of 1/2 S^T H* S
  double inverse_omega = 0.0;   // 1/w, coefficient left to measurement
};

ResidualBounds residual_bounds(const QuadraticMap& map, const DitherSpec& spec, double omega);

}  // namespace uvesc
