#include "uvesc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uvesc/errors.hpp"
#include "uvesc/signals.hpp"

namespace uvesc {

LyapunovCertificate solve_lyapunov(const Matrix& a_matrix, const Matrix& q_matrix) {
  const std::size_t n = a_matrix.rows();
  if (!a_matrix.square() || n == 0) throw DimensionError("solve_lyapunov: A must be square");
  if (q_matrix.rows() != n || q_matrix.cols() != n) throw DimensionError("solve_lyapunov: Q must match A");
  if (!is_symmetric(q_matrix, 1e-12)) throw ValidationError("solve_lyapunov: Q is not symmetric");
  const auto [q_min, q_max] = symmetric_eigen_bounds(q_matrix);
  if (!(q_min > 0.0)) throw ValidationError("solve_lyapunov: Q is not positive definite");

  // Row-major vec: P(i,j) -> i*n + j.
  //   (A^T P)(i,j) = sum_k A(k,i) P(k,j),   (P A)(i,j) = sum_k P(i,k) A(k,j)
  const std::size_t m = n * n;
  Matrix big(m, m);
  Vector rhs(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        big(row, k * n + j) += a_matrix(k, i);
        big(row, i * n + k) += a_matrix(k, j);
      }
      rhs[row] = -q_matrix(i, j);
    }

  Vector p_vec;
  try {
    p_vec = solve_linear(big, rhs);
  } catch (const SingularMatrixError&) {
    throw NotHurwitzError("solve_lyapunov: Lyapunov operator is singular (A has eigenvalues summing to zero)");
  }

  LyapunovCertificate cert;
  cert.a_matrix = a_matrix;
  cert.q_matrix = q_matrix;
  cert.p_matrix = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cert.p_matrix(i, j) = 0.5 * (p_vec[i * n + j] + p_vec[j * n + i]);
  for (double v : cert.p_matrix.data())
    if (!std::isfinite(v)) throw NotHurwitzError("solve_lyapunov: non-finite solution");

  const auto [p_min, p_max] = symmetric_eigen_bounds(cert.p_matrix);
  if (!(p_min > 0.0))
    throw NotHurwitzError("solve_lyapunov: P is not positive definite (lambda_min(P) = " + std::to_string(p_min) +
                          "), so A is not Hurwitz");
  cert.lambda_min_p = p_min;
  cert.lambda_max_p = p_max;
  cert.lambda_min_q = q_min;
  cert.lambda_max_q = q_max;
  return cert;
}

bool is_hurwitz(const Matrix& a_matrix) {
  try {
    solve_lyapunov(a_matrix, Matrix::identity(a_matrix.rows()));
    return true;
  } catch (const NotHurwitzError&) {
    return false;
  }
}

LyapunovCertificate gradient_certificate(const Matrix& hessian, const Matrix& gain, const Matrix& q_matrix) {
  return solve_lyapunov(hessian * gain, q_matrix);
}

LyapunovCertificate newton_certificate(const Matrix& gain, const Matrix& q_matrix) {
  return solve_lyapunov(gain * -1.0, q_matrix);
}

double settling_bound(const LyapunovCertificate& cert, BoundForm form, double initial_norm, double omega,
                      TimeFrame frame, std::optional<double> h_norm) {
  if (!(initial_norm >= 0.0)) throw ValidationError("settling_bound: initial_norm must be non-negative");
  if (!(cert.lambda_min_q > 0.0)) throw ValidationError("settling_bound: certificate has no positive lambda_min(Q)");
  const double ratio = 2.0 * cert.lambda_max_p / cert.lambda_min_q;
  if (frame == TimeFrame::SlowTime) {
    if (!(omega > 0.0)) throw ValidationError("settling_bound: omega must be positive");
    return omega * ratio * initial_norm;
  }
  if (form == BoundForm::Gradient) {
    if (!h_norm) throw ValidationError("settling_bound: gradient original-time form needs ||H*||");
    return ratio * *h_norm * initial_norm;
  }
  return ratio * initial_norm;
}

namespace {

const std::vector<Vector>& series_for(const Trajectory& traj, SignalKind signal) {
  return signal == SignalKind::GHat ? traj.g_hat : traj.theta_hat;
}

void require_theta_star(const Trajectory& traj, SignalKind signal, std::span<const double> theta_star) {
  if (signal == SignalKind::ThetaTilde && theta_star.size() != traj.dimension())
    throw ValidationError("theta_tilde signal needs theta_star of the trajectory dimension");
}

}  // namespace

Vector signal_norms(const Trajectory& traj, SignalKind signal, std::span<const double> theta_star) {
  require_theta_star(traj, signal, theta_star);
  const auto& series = series_for(traj, signal);
  Vector out(series.size());
  for (std::size_t k = 0; k < series.size(); ++k)
    out[k] = signal == SignalKind::GHat ? norm(series[k]) : norm(subtract(series[k], theta_star));
  return out;
}

Vector signal_component(const Trajectory& traj, SignalKind signal, std::size_t component,
                        std::span<const double> theta_star) {
  require_theta_star(traj, signal, theta_star);
  if (component >= traj.dimension()) throw DimensionError("signal_component: component out of range");
  const auto& series = series_for(traj, signal);
  Vector out(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double v = series[k][component] - (signal == SignalKind::ThetaTilde ? theta_star[component] : 0.0);
    out[k] = std::abs(v);
  }
  return out;
}

std::optional<double> detect_sliding(std::span<const double> times, std::span<const double> values, double tol,
                                     double window) {
  if (times.size() != values.size()) throw DimensionError("detect_sliding: times and values differ in length");
  if (times.empty()) throw ValidationError("detect_sliding: empty series");
  if (!(window >= 0.0)) throw ValidationError("detect_sliding: window must be non-negative");
  const double span = times.back() - times.front();
  const double eps = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (window > span + eps) throw ValidationError("detect_sliding: window exceeds trajectory span");

  // Last start index whose window fits entirely inside the series.
  std::size_t last_start = times.size() - 1;
  while (last_start > 0 && times[last_start] + window > times.back() + eps) --last_start;

  // Scan starts from the end, sliding the window left. Values near the end are the small ones,
  // and the scan stops at the first violation, so the running sum never has to shed a large term.
  std::size_t end = times.size() - 1;  // inclusive right edge of the current window
  double sum = 0.0;
  for (std::size_t j = last_start; j <= end; ++j) sum += values[j] * values[j];

  std::optional<std::size_t> onset;
  for (std::size_t k = last_start + 1; k-- > 0;) {
    if (k < last_start) {
      sum += values[k] * values[k];
      while (end > k && times[end] > times[k] + window + eps) {
        sum -= values[end] * values[end];
        --end;
      }
    }
    const double rms = std::sqrt(std::max(0.0, sum) / static_cast<double>(end - k + 1));
    if (rms > tol) break;
    onset = k;
  }
  if (!onset) return std::nullopt;
  return times[*onset];
}

std::optional<double> detect_sliding(const Trajectory& traj, SignalKind signal, double tol, double window,
                                     std::span<const double> theta_star) {
  const Vector s = signal_norms(traj, signal, theta_star);
  return detect_sliding(traj.times, s, tol, window);
}

std::string_view to_string(DecayClass c) {
  switch (c) {
    case DecayClass::FiniteTimeLinear: return "finite_time_linear";
    case DecayClass::Exponential: return "exponential";
    case DecayClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

struct LineFit {
  double intercept;
  double slope;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {my - slope * mx, slope};
}

}  // namespace

DecayFit decay_classifier(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw DimensionError("decay_classifier: times and values differ in length");
  DecayFit fit;
  if (values.size() < 3) return fit;

  const double s0 = values.front();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(s0 > 0.0) || *hi - *lo <= 1e-12 * std::max(std::abs(s0), std::numeric_limits<double>::min())) return fit;

  std::size_t end = 0;
  while (end < values.size() && values[end] > 1e-3 * s0) ++end;
  fit.samples = end;
  if (end < 3) return fit;
  fit.segment_end = times[end - 1];

  const auto t = times.first(end);
  const auto s = values.first(end);
  const double seg_min = *std::min_element(s.begin(), s.end());
  if (seg_min > 0.1 * s0 * (1.0 + 1e-9)) return fit;  // less than one decade

  const LineFit lin = least_squares_line(t, s);
  Vector log_s(end);
  for (std::size_t i = 0; i < end; ++i) log_s[i] = std::log(s[i]);
  const LineFit ex = least_squares_line(t, log_s);

  double lin_ss = 0.0, exp_ss = 0.0;
  for (std::size_t i = 0; i < end; ++i) {
    const double rl = lin.intercept + lin.slope * t[i] - s[i];
    const double re = std::exp(ex.intercept + ex.slope * t[i]) - s[i];
    lin_ss += rl * rl;
    exp_ss += re * re;
  }
  fit.linear_rms = std::sqrt(lin_ss / static_cast<double>(end));
  fit.exponential_rms = std::sqrt(exp_ss / static_cast<double>(end));
  fit.slope = lin.slope;
  fit.rate = -ex.slope;

  constexpr double kDominance = 2.0;
  if (fit.slope < 0.0 && kDominance * fit.linear_rms <= fit.exponential_rms) {
    fit.classification = DecayClass::FiniteTimeLinear;
  } else if (fit.rate > 0.0 && kDominance * fit.exponential_rms <= fit.linear_rms) {
    fit.classification = DecayClass::Exponential;
  }
  return fit;
}

DecayFit decay_classifier(const Trajectory& traj, SignalKind signal, std::span<const double> theta_star) {
  const Vector s = signal_norms(traj, signal, theta_star);
  return decay_classifier(traj.times, s);
}

ResidualBounds residual_bounds(const QuadraticMap& map, const DitherSpec& spec, double omega) {
  const DitherGenerator gen(spec);
  if (map.dimension() != gen.dimension()) throw DimensionError("residual_bounds: map and dither dimensions differ");
  ResidualBounds rb;
  rb.theta_residual = norm(spec.amplitudes);
  rb.inverse_omega = omega > 0.0 ? 1.0 / omega : std::numeric_limits<double>::infinity();

  const double period = gen.period();
  const double w_max = *std::max_element(gen.frequencies().begin(), gen.frequencies().end());
  const auto nodes = static_cast<std::size_t>(std::max(2.0e5, 2000.0 * period * w_max / (2.0 * 3.141592653589793)));
  double peak = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const Vector s = gen.perturbation(period * static_cast<double>(k) / static_cast<double>(nodes));
    peak = std::max(peak, 0.5 * dot(s, map.hessian * s));
  }
  rb.y_residual = peak;
  return rb;
}

}  // namespace uvesc
