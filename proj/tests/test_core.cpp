#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

using namespace uvesc;
using namespace uvesc::testing;

TEST_CASE("symmetric_eigen_bounds on small fixed matrices") {
  auto [lo, hi] = symmetric_eigen_bounds(Matrix::identity(2));
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(1.0));

  std::tie(lo, hi) = symmetric_eigen_bounds(Matrix{{2.0, 0.0}, {0.0, 5.0}});
  CHECK(lo == doctest::Approx(2.0));
  CHECK(hi == doctest::Approx(5.0));

  // roots of l^2 - 120 l + 1100 are 60 +- 50
  std::tie(lo, hi) = symmetric_eigen_bounds(reference_map().hessian);
  CHECK(lo == doctest::Approx(60.0 - std::sqrt(2500.0)).epsilon(1e-12));
  CHECK(hi == doctest::Approx(60.0 + std::sqrt(2500.0)).epsilon(1e-12));
  CHECK(lo == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(110.0).epsilon(1e-12));
}

TEST_CASE("symmetric_eigen_bounds rejects non-symmetric input") {
  CHECK_THROWS_AS(symmetric_eigen_bounds(Matrix{{1.0, 2.0}, {0.0, 1.0}}), ValidationError);
}

TEST_CASE("Jacobi eigenvalues agree with Eigen and satisfy Rayleigh-Ritz") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 8; ++n) {
    const Matrix m = random_symmetric(rng, n);
    const Vector ours = symmetric_eigenvalues(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
    for (std::size_t i = 0; i < n; ++i) CHECK(ours[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));

    const auto [lo, hi] = symmetric_eigen_bounds(m);
    for (int k = 0; k < 100; ++k) {
      Vector x = random_vector(rng, n);
      x = scaled(x, 1.0 / norm(x));
      const double q = dot(x, m * x);
      CHECK(q >= lo - 1e-12);
      CHECK(q <= hi + 1e-12);
    }
  }
}

TEST_CASE("invert_small fixed cases") {
  CHECK(invert_small(Matrix::identity(3)) == Matrix::identity(3));

  const Matrix h_inv = invert_small(reference_map().hessian);
  CHECK(h_inv(0, 0) == doctest::Approx(0.0182).epsilon(5e-3));
  CHECK(h_inv(0, 1) == doctest::Approx(-0.0273).epsilon(5e-3));
  CHECK(h_inv(1, 0) == doctest::Approx(-0.0273).epsilon(5e-3));
  CHECK(h_inv(1, 1) == doctest::Approx(0.0909).epsilon(5e-3));

  const Matrix d = invert_small(Matrix{{2.0, 0.0}, {0.0, 4.0}});
  CHECK(d(0, 0) == 0.5);
  CHECK(d(1, 1) == 0.25);
  CHECK(d(0, 1) == 0.0);
}

TEST_CASE("invert_small is an involution and a right inverse") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix m = random_matrix(rng, n, n) + Matrix::identity(n) * 3.0;
    const Matrix inv = invert_small(m);
    CHECK(max_abs(m * inv - Matrix::identity(n)) < 1e-9);
    CHECK(max_abs(invert_small(inv) - m) < 1e-8);
  }
}

TEST_CASE("invert_small and solve_linear reject singular matrices") {
  CHECK_THROWS_AS(invert_small(Matrix{{1.0, 2.0}, {2.0, 4.0}}), SingularMatrixError);
  CHECK_THROWS_AS(invert_small(Matrix{{1e-7, 0.0}, {0.0, 1e-7}}), SingularMatrixError);
  CHECK_NOTHROW(invert_small(Matrix{{1e-7, 0.0}, {0.0, 1e-7}}, 1e-16));
  CHECK_THROWS_AS(solve_linear(Matrix{{1.0, 1.0}, {1.0, 1.0}}, Vector{1.0, 2.0}), SingularMatrixError);
}

TEST_CASE("solve_linear matches Eigen") {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 16; n += 3) {
    const Matrix a = random_matrix(rng, n, n) + Matrix::identity(n) * 2.0;
    const Vector b = random_vector(rng, n);
    const Vector x = solve_linear(a, b);
    const Eigen::VectorXd xe = to_eigen(a).partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xe(i)).epsilon(1e-10));
  }
}

TEST_CASE("spectral norm and determinant against Eigen") {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Matrix m = random_matrix(rng, n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
    CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
    CHECK(determinant(m) == doctest::Approx(to_eigen(m).determinant()).epsilon(1e-10));
  }
  CHECK(spectral_norm(reference_map().hessian) == doctest::Approx(60.0 + 50.0).epsilon(1e-12));
}

TEST_CASE("matrix dimension errors") {
  CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2) * Vector{1.0}, DimensionError);
  CHECK_THROWS_AS(add(Vector{1.0}, Vector{1.0, 2.0}), DimensionError);
}

TEST_CASE("QuadraticMap validation") {
  QuadraticMap m = reference_map();
  CHECK_NOTHROW(m.validate());
  m.hessian(0, 1) = 31.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m = reference_map();
  m.hessian = Matrix{{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(m.validate(), SingularMatrixError);
  m = reference_map();
  m.theta_star = {1.0};
  CHECK_THROWS_AS(m.validate(), DimensionError);
}

TEST_CASE("DitherSpec validation and frequencies") {
  DitherSpec d = reference_dither();
  CHECK_NOTHROW(d.validate());
  const Vector w = d.frequencies();
  CHECK(w[0] == doctest::Approx(7.0));
  CHECK(w[1] == doctest::Approx(5.0));

  d.amplitudes[1] = 0.0;
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d = reference_dither();
  d.ratios = {Rational(2), Rational(2)};
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d = reference_dither();
  d.ratios = {Rational(-1), Rational(2)};
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d = reference_dither();
  d.base_omega = 0.0;
  CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("ControllerLaw validation") {
  CHECK_NOTHROW(gradient_law().validate(2));
  CHECK_NOTHROW(newton_law().validate(2));

  ControllerLaw law = newton_law();
  law.gamma0 = Matrix(2, 2);
  CHECK_THROWS_AS(law.validate(2), SingularMatrixError);
  law = newton_law();
  law.riccati_rate = 0.0;
  CHECK_THROWS_AS(law.validate(2), ValidationError);
  law = gradient_law();
  law.relay_guard = 0.0;
  CHECK_THROWS_AS(law.validate(2), ValidationError);
  CHECK_THROWS_AS(gradient_law().validate(3), DimensionError);
}

TEST_CASE("parse_rational") {
  CHECK(parse_rational("70") == Rational(70));
  CHECK(parse_rational("7/2") == Rational(7, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(parse_rational(" 14/4 ") == Rational(7, 2));
  CHECK_THROWS_AS(parse_rational("abc"), ValidationError);
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational(""), ValidationError);
  CHECK(to_string(Rational(7, 2)) == "7/2");
  CHECK(to_string(Rational(70)) == "70");
}

TEST_CASE("law kind spellings round-trip") {
  for (auto k : {LawKind::GradientUVC, LawKind::NewtonUVC, LawKind::GradientProportional, LawKind::NewtonProportional})
    CHECK(parse_law_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_law_kind("newton"), ValidationError);
}

TEST_CASE("Trajectory validation") {
  Trajectory t;
  for (int k = 0; k < 3; ++k) {
    t.times.push_back(0.5 * k);
    t.theta_hat.push_back({0.0});
    t.theta.push_back({0.0});
    t.y.push_back(0.0);
    t.g_hat.push_back({0.0});
    t.u.push_back({0.0});
  }
  CHECK_NOTHROW(t.validate());
  t.times[2] = 1.2;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t.times[2] = 1.0;
  t.y.pop_back();
  CHECK_THROWS_AS(t.validate(), ValidationError);
}
