#pragma once

#include <Eigen/Dense>

#include <random>

#include "uvesc/types.hpp"

namespace uvesc::testing {

// Two-input setup used throughout: Q* = 100, theta* = [2, 4], H* = [[100, 30], [30, 20]].
inline QuadraticMap reference_map() {
  QuadraticMap m;
  m.q_star = 100.0;
  m.theta_star = {2.0, 4.0};
  m.hessian = Matrix{{100.0, 30.0}, {30.0, 20.0}};
  return m;
}

inline DitherSpec reference_dither(double base_omega = 0.1) {
  DitherSpec d;
  d.amplitudes = {0.1, 0.1};
  d.ratios = {Rational(70), Rational(50)};
  d.base_omega = base_omega;
  return d;
}

inline ControllerLaw gradient_law(LawKind kind = LawKind::GradientUVC) {
  ControllerLaw law;
  law.kind = kind;
  law.gain = Matrix{{-0.025, 0.0}, {0.0, -0.025}};
  return law;
}

inline ControllerLaw newton_law(LawKind kind = LawKind::NewtonUVC) {
  ControllerLaw law;
  law.kind = kind;
  law.gain = Matrix::identity(2);
  law.riccati_rate = 1.0;
  law.gamma0 = Matrix::identity(2) * 0.0025;
  return law;
}

inline SimConfig reference_config(const ControllerLaw& law, double t_end) {
  SimConfig c;
  c.map = reference_map();
  c.dither = reference_dither();
  c.law = law;
  c.theta_hat0 = {4.5, 9.0};
  c.t_end = t_end;
  c.dt = 2.0 * 3.141592653589793 / 2000.0;
  return c;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.data()) v = nd(rng);
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  const Matrix a = random_matrix(rng, n, n);
  return (a + a.transposed()) * 0.5;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

// Hurwitz by construction: -M^T M - I plus a small skew part.
inline Matrix random_hurwitz(std::mt19937_64& rng, std::size_t n) {
  const Matrix m = random_matrix(rng, n, n);
  const Matrix s = random_matrix(rng, n, n, 0.3);
  return (m.transposed() * m) * -1.0 - Matrix::identity(n) + (s - s.transposed()) * 0.5;
}

// Rectangle rule over one period of a periodic integrand; spectrally accurate for trig polynomials.
template <typename F>
Vector period_average_vector(F&& f, double period, std::size_t nodes) {
  Vector acc = f(0.0);
  for (std::size_t k = 1; k < nodes; ++k) {
    const Vector v = f(period * static_cast<double>(k) / static_cast<double>(nodes));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  for (double& x : acc) x /= static_cast<double>(nodes);
  return acc;
}

template <typename F>
Matrix period_average_matrix(F&& f, double period, std::size_t nodes) {
  Matrix acc = f(0.0);
  for (std::size_t k = 1; k < nodes; ++k) acc += f(period * static_cast<double>(k) / static_cast<double>(nodes));
  return acc * (1.0 / static_cast<double>(nodes));
}

}  // namespace uvesc::testing
