#include <doctest.h>

#include "support.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/estimation.hpp"
#include "uvesc/plant.hpp"
#include "uvesc/signals.hpp"

using namespace uvesc;
using namespace uvesc::testing;

namespace {

double measured_y(const QuadraticMap& map, const DitherSpec& d, std::span<const double> tt, double t) {
  return evaluate_map(map, add(add(map.theta_star, tt), dither_S(t, d)));
}

double rel(double err, double ref) { return err / std::max(ref, 1e-300); }

// Three-input problem with valid, pairwise resonance-free ratios.
QuadraticMap map3() {
  QuadraticMap m;
  m.q_star = -7.0;
  m.theta_star = {1.0, -2.0, 0.5};
  m.hessian = Matrix{{4.0, 1.0, -0.5}, {1.0, 3.0, 0.25}, {-0.5, 0.25, 2.0}};
  return m;
}

DitherSpec dither3() {
  DitherSpec d;
  d.amplitudes = {0.2, 0.15, 0.3};
  d.ratios = {Rational(13), Rational(17), Rational(29)};
  d.base_omega = 0.5;
  return d;
}

}  // namespace

TEST_CASE("estimate_gradient and estimate_hessian fixed values") {
  const DitherSpec d = reference_dither();
  for (double v : estimate_gradient(d, 1.3, 0.0)) CHECK(v == 0.0);
  for (double v : estimate_gradient(d, 0.0, 123.0)) CHECK(v == 0.0);
  CHECK(max_abs(estimate_hessian(d, 2.0, 0.0)) == 0.0);
  const Matrix h0 = estimate_hessian(d, 0.0, 100.0);
  CHECK(h0(0, 0) == doctest::Approx(-80000.0));
  CHECK(h0(1, 1) == doctest::Approx(-80000.0));
  CHECK(h0(0, 1) == 0.0);
}

TEST_CASE("period-averaged estimators recover H* theta_tilde and H*") {
  const QuadraticMap m = reference_map();
  const DitherSpec d = reference_dither();
  const double period = common_period(d);
  const Vector tt{0.5, 0.0};
  const Vector g = period_average_vector(
      [&](double t) { return estimate_gradient(d, t, measured_y(m, d, tt, t)); }, period, 20000);
  CHECK(g[0] == doctest::Approx(50.0).epsilon(1e-2));
  CHECK(g[1] == doctest::Approx(15.0).epsilon(1e-2));

  const Vector zero{0.0, 0.0};
  const Matrix h = period_average_matrix(
      [&](double t) { return estimate_hessian(d, t, measured_y(m, d, zero, t)); }, period, 20000);
  CHECK(max_abs(h - m.hessian) < 1e-2);
}

TEST_CASE("averaged estimator consistency for small frozen offsets") {
  const QuadraticMap m = reference_map();
  const DitherSpec d = reference_dither();
  const double period = common_period(d);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Vector tt = random_vector(rng, 2);
    tt = scaled(tt, 0.5 * (0.2 + 0.08 * trial) / norm(tt));
    const Vector g = period_average_vector(
        [&](double t) { return estimate_gradient(d, t, measured_y(m, d, tt, t)); }, period, 8000);
    const Vector expect = m.hessian * tt;
    CHECK(norm(subtract(g, expect)) <= 5e-2 * norm(expect));
    const Matrix h = period_average_matrix(
        [&](double t) { return estimate_hessian(d, t, measured_y(m, d, tt, t)); }, period, 8000);
    CHECK(frobenius_norm(h - m.hessian) <= 5e-2 * frobenius_norm(m.hessian));
  }
}

TEST_CASE("riccati_rhs fixed values") {
  const Matrix h = reference_map().hessian;
  CHECK(max_abs(riccati_rhs(invert_small(h), h, 1.0)) < 1e-12);
  CHECK(max_abs(riccati_rhs(Matrix(2, 2), h, 1.0)) == 0.0);
  CHECK(riccati_rhs(Matrix{{1.0}}, Matrix{{2.0}}, 1.0)(0, 0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(riccati_rhs(Matrix(2, 2), Matrix(3, 3), 1.0), DimensionError);
}

TEST_CASE("Euler steps of the Riccati flow keep Gamma symmetric") {
  std::mt19937_64 rng(5);
  Matrix gamma = Matrix::identity(3) * 0.1;
  for (int k = 0; k < 1000; ++k) {
    const Matrix h = random_symmetric(rng, 3);
    gamma += riccati_rhs(gamma, h, 1.0) * 1e-3;
    CHECK(max_abs(gamma - gamma.transposed()) <= 1e-9 * std::max(1.0, max_abs(gamma)));
  }
}

TEST_CASE("gradient decomposition with zero offset is Delta alone") {
  const QuadraticMap m = reference_map();
  const DitherSpec d = reference_dither();
  const Vector zero{0.0, 0.0};
  for (double t : {0.3, 1.1, 4.0}) {
    const GradientDecomposition dec = gradient_decomposition(m, d, zero, t);
    const Vector direct = estimate_gradient(d, t, measured_y(m, d, zero, t));
    CHECK(rel(norm(subtract(dec.delta, direct)), norm(direct)) < 1e-12);
    for (double v : dec.quadratic_term) CHECK(v == 0.0);
  }
}

TEST_CASE("hessian decomposition with zero offset is H* + Delta-hat") {
  const QuadraticMap m = reference_map();
  const DitherSpec d = reference_dither();
  const Vector zero{0.0, 0.0};
  for (double t : {0.3, 1.1, 4.0}) {
    const HessianDecomposition dec = hessian_decomposition(m, d, zero, t);
    const Matrix direct = estimate_hessian(d, t, measured_y(m, d, zero, t));
    CHECK(rel(frobenius_norm(m.hessian + dec.delta_h_hat - direct), frobenius_norm(direct)) < 1e-12);
    CHECK(max_abs(dec.residual_term) == 0.0);
  }
}

TEST_CASE("decomposition identities hold exactly for three inputs") {
  const QuadraticMap m = map3();
  const DitherSpec d = dither3();
  REQUIRE(validate_frequencies(d).valid);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(0.0, 500.0);
  double worst_g = 0.0, worst_h = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector tt = random_vector(rng, 3, 2.0);
    const double t = ut(rng);
    const double y = measured_y(m, d, tt, t);
    const Vector g = estimate_gradient(d, t, y);
    const Matrix h = estimate_hessian(d, t, y);
    worst_g = std::max(worst_g,
                       rel(norm(subtract(gradient_decomposition(m, d, tt, t).reconstruct(m.hessian, tt), g)), norm(g)));
    worst_h = std::max(worst_h, rel(frobenius_norm(hessian_decomposition(m, d, tt, t).reconstruct(m.hessian) - h),
                                    frobenius_norm(h)));
  }
  CHECK(worst_g < 1e-9);
  CHECK(worst_h < 1e-9);
}

TEST_CASE("oscillatory decomposition terms have zero mean for three inputs") {
  const QuadraticMap m = map3();
  const DitherSpec d = dither3();
  const double period = common_period(d);
  const Vector tt{0.3, -0.2, 0.1};
  const Matrix dh = period_average_matrix([&](double t) { return gradient_decomposition(m, d, tt, t).delta_h; },
                                          period, 20000);
  const Vector dl = period_average_vector([&](double t) { return gradient_decomposition(m, d, tt, t).delta; },
                                          period, 20000);
  const Matrix dhh = period_average_matrix(
      [&](double t) { return hessian_decomposition(m, d, tt, t).delta_h_hat; }, period, 20000);
  CHECK(max_abs(dh) < 1e-6);
  CHECK(max_abs(dl) < 1e-6);
  CHECK(max_abs(dhh) < 1e-6);
}

TEST_CASE("decompositions reject mismatched dimensions") {
  CHECK_THROWS_AS(gradient_decomposition(reference_map(), reference_dither(), Vector{1.0}, 0.0), DimensionError);
  CHECK_THROWS_AS(hessian_decomposition(reference_map(), dither3(), Vector{1.0, 2.0}, 0.0), DimensionError);
}
