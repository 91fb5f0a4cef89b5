#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "uvesc/linalg.hpp"

namespace uvesc {

using Rational = boost::rational<std::int64_t>;

/// Parses "70", "7/2" or a finite decimal such as "0.25" into an exact rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

/// Ground-truth objective y = q_star + 1/2 (theta - theta_star)^T H (theta - theta_star).
/// Only the simulator and test oracles see this; controllers never do.
struct QuadraticMap {
  double q_star = 0.0;
  Vector theta_star;
  Matrix hessian;

  std::size_t dimension() const noexcept { return theta_star.size(); }

  /// Checks symmetry and invertibility of the hessian. Throws ValidationError / SingularMatrixError.
  void validate(double det_floor = kDefaultDeterminantFloor) const;
};

/// Sinusoidal probing: S_i = a_i sin(w_i t), w_i = ratio_i * base_omega.
struct DitherSpec {
  Vector amplitudes;
  std::vector<Rational> ratios;
  double base_omega = 1.0;

  std::size_t dimension() const noexcept { return amplitudes.size(); }
  Vector frequencies() const;

  /// Positive amplitudes, positive pairwise-distinct ratios, positive base frequency.
  void validate() const;
};

enum class LawKind { GradientUVC, NewtonUVC, GradientProportional, NewtonProportional };

std::string_view to_string(LawKind kind);
/// Accepts the CLI spellings gradient-uvc, newton-uvc, gradient-prop, newton-prop.
LawKind parse_law_kind(std::string_view text);

constexpr bool is_newton(LawKind k) noexcept {
  return k == LawKind::NewtonUVC || k == LawKind::NewtonProportional;
}
constexpr bool is_unit_vector(LawKind k) noexcept {
  return k == LawKind::GradientUVC || k == LawKind::NewtonUVC;
}

struct ControllerLaw {
  LawKind kind = LawKind::GradientUVC;
  Matrix gain;
  double riccati_rate = 0.0;  // w_r, Newton kinds only
  double relay_guard = 1e-9;  // relay output is zero when the relay argument norm is at or below this
  Matrix gamma0;              // Gamma(0), Newton kinds only

  void validate(std::size_t n, double det_floor = kDefaultDeterminantFloor) const;
};

struct SimConfig {
  QuadraticMap map;
  DitherSpec dither;
  ControllerLaw law;
  Vector theta_hat0;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t sample_every = 1;
  /// Additive measurement disturbance d(t) on y. Empty means none.
  std::function<double(double)> output_disturbance;
};

struct Trajectory {
  Vector times;
  std::vector<Vector> theta_hat;
  std::vector<Vector> theta;
  Vector y;
  std::vector<Vector> g_hat;
  std::vector<Vector> u;
  std::vector<Matrix> gamma;  // non-empty iff Newton kind

  std::size_t size() const noexcept { return times.size(); }
  std::size_t dimension() const noexcept { return theta_hat.empty() ? 0 : theta_hat.front().size(); }
  bool has_gamma() const noexcept { return !gamma.empty(); }

  void reserve(std::size_t n, bool with_gamma);
  /// Checks equal series lengths and strictly increasing, uniformly spaced times.
  void validate(double spacing_rel_tol = 1e-9) const;
};

struct LyapunovCertificate {
  Matrix a_matrix;
  Matrix q_matrix;
  Matrix p_matrix;
  double lambda_min_p = 0.0;
  double lambda_max_p = 0.0;
  double lambda_min_q = 0.0;
  double lambda_max_q = 0.0;

  /// ||A^T P + P A + Q||_F.
  double residual() const;
};

}  // namespace uvesc
