#include "uvesc/estimation.hpp"

#include <cmath>

#include "uvesc/errors.hpp"
#include "uvesc/signals.hpp"

namespace uvesc {

Vector estimate_gradient(const DitherSpec& spec, double t, double y) {
  return scaled(demod_M(t, spec), y);
}

Matrix estimate_hessian(const DitherSpec& spec, double t, double y) {
  return hessian_N(t, spec) * y;
}

Matrix riccati_rhs(const Matrix& gamma, const Matrix& h_est, double omega_r) {
  if (!gamma.square() || gamma.rows() != h_est.rows() || gamma.cols() != h_est.cols())
    throw DimensionError("riccati_rhs: gamma and h_est must be square of equal size");
  return (gamma - gamma * h_est * gamma) * omega_r;
}

Vector GradientDecomposition::reconstruct(const Matrix& hessian, std::span<const double> theta_tilde) const {
  return add(add(quadratic_term, (hessian + delta_h) * theta_tilde), delta);
}

Matrix HessianDecomposition::reconstruct(const Matrix& hessian) const {
  return hessian + delta_h_hat + residual_term;
}

namespace {

struct Prepared {
  std::size_t n;
  Vector a;
  Vector w;
  double t;  // phase-reduced time
};

Prepared prepare(const QuadraticMap& map, const DitherSpec& spec, std::span<const double> theta_tilde, double t) {
  const DitherGenerator gen(spec);
  const std::size_t n = gen.dimension();
  if (map.dimension() != n || theta_tilde.size() != n)
    throw DimensionError("decomposition: map, dither and theta_tilde dimensions differ");
  return {n, gen.amplitudes(), gen.frequencies(), std::fmod(t, gen.period())};
}

double quadratic_form(const Matrix& h, std::span<const double> x) { return dot(x, h * x); }

// sin A sin B sin C sin D as eight cosines.
double four_sine_product(double a, double b, double c, double d) {
  return 0.125 * (std::cos(a - b + c - d) + std::cos(a - b - c + d) - std::cos(a - b + c + d) -
                  std::cos(a - b - c - d) - std::cos(a + b + c - d) - std::cos(a + b - c + d) +
                  std::cos(a + b + c + d) + std::cos(a + b - c - d));
}

}  // namespace

GradientDecomposition gradient_decomposition(const QuadraticMap& map, const DitherSpec& spec,
                                             std::span<const double> theta_tilde, double t_in) {
  const auto [n, a, w, t] = prepare(map, spec, theta_tilde, t_in);
  const Matrix& h = map.hessian;

  GradientDecomposition d;
  d.delta_h = Matrix(n, n);
  d.delta.assign(n, 0.0);
  d.quadratic_term.assign(n, 0.0);

  const double half_quad = 0.5 * quadratic_form(h, theta_tilde);
  for (std::size_t i = 0; i < n; ++i) {
    const double si = std::sin(w[i] * t);
    d.quadratic_term[i] = 2.0 / a[i] * si * half_quad;

    for (std::size_t j = 0; j < n; ++j) {
      double v = -h(i, j) * std::cos(2.0 * w[i] * t);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        const double c = h(k, j) * a[k] / a[i];
        v += c * std::cos((w[i] - w[k]) * t) - c * std::cos((w[i] + w[k]) * t);
      }
      d.delta_h(i, j) = v;
    }

    double delta = 2.0 * map.q_star / a[i] * si;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double c = 0.25 * h(j, k) * a[j] * a[k] / a[i];
        delta += c * std::sin((w[i] + w[j] - w[k]) * t);
        delta += c * std::sin((w[i] - w[j] + w[k]) * t);
        delta -= c * std::sin((w[i] + w[j] + w[k]) * t);
        delta -= c * std::sin((w[i] - w[j] - w[k]) * t);
      }
    d.delta[i] = delta;
  }
  return d;
}

HessianDecomposition hessian_decomposition(const QuadraticMap& map, const DitherSpec& spec,
                                           std::span<const double> theta_tilde, double t_in) {
  const auto [n, a, w, t] = prepare(map, spec, theta_tilde, t_in);
  const Matrix& h = map.hessian;
  const Matrix nt = hessian_N(t, spec);
  const double q = map.q_star;

  HessianDecomposition d;
  d.delta_h_hat = Matrix(n, n);

  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w[i];
    const double ai2 = a[i] * a[i];
    double v = -2.0 * h(i, i) * std::cos(2.0 * wi * t) + h(i, i) * std::cos(4.0 * wi * t) + nt(i, i) * q;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double c = h(k, k) * a[k] * a[k] / ai2;
      v += -2.0 * c * std::cos(2.0 * wi * t);
      v += c * (std::cos(2.0 * (wi - w[k]) * t) + std::cos(2.0 * (wi + w[k]) * t));
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l) {
        const double c = 2.0 * h(k, l) * a[k] * a[l] / ai2;
        v -= c * std::cos((2.0 * wi + w[k] - w[l]) * t);
        v -= c * std::cos((2.0 * wi - w[k] + w[l]) * t);
        v += c * std::cos((2.0 * wi + w[k] + w[l]) * t);
        v += c * std::cos((2.0 * wi - w[k] - w[l]) * t);
      }
    d.delta_h_hat(i, i) = v;

    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double pre = 2.0 / (a[i] * a[j]);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        s += h(k, k) * a[k] * a[k] * four_sine_product(wi * t, w[j] * t, w[k] * t, w[k] * t);
        for (std::size_t l = k + 1; l < n; ++l)
          s += 2.0 * h(k, l) * a[k] * a[l] * four_sine_product(wi * t, w[j] * t, w[k] * t, w[l] * t);
      }
      d.delta_h_hat(i, j) = nt(i, j) * q - h(i, j) + pre * s;
    }
  }

  Vector s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = a[i] * std::sin(w[i] * t);
  const Vector h_tt = h * theta_tilde;
  d.residual_term = nt * (0.5 * dot(theta_tilde, h_tt) + dot(s, h_tt));
  return d;
}

}  // namespace uvesc
