#include <doctest.h>

#include "support.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/estimation.hpp"
#include "uvesc/signals.hpp"
#include "uvesc/sim.hpp"

using namespace uvesc;
using namespace uvesc::testing;

TEST_CASE("starting at the optimum keeps y inside the ripple band") {
  SimConfig c = reference_config(gradient_law(), 1000.0);
  c.theta_hat0 = c.map.theta_star;
  c.sample_every = 10;
  const Trajectory traj = simulate_full(c);
  CHECK_NOTHROW(traj.validate());
  double worst = 0.0;
  for (double y : traj.y) worst = std::max(worst, std::abs(y - 100.0));
  CHECK(worst <= 1.5);
}

TEST_CASE("full simulation is deterministic and decimates correctly") {
  SimConfig c = reference_config(gradient_law(), 20.0);
  c.sample_every = 7;
  const Trajectory a = simulate_full(c), b = simulate_full(c);
  CHECK(a.times == b.times);
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(a.y == b.y);
  CHECK(a.u == b.u);
  const std::size_t steps = static_cast<std::size_t>(std::llround(c.t_end / c.dt));
  CHECK(a.size() == steps / 7 + 1);
  CHECK(a.times[1] == doctest::Approx(7 * c.dt));
  CHECK_NOTHROW(a.validate());
  CHECK_FALSE(a.has_gamma());
  // theta = theta_hat + S(t) sample by sample
  for (std::size_t k = 0; k < a.size(); k += 50)
    CHECK(max_abs(subtract(subtract(a.theta[k], a.theta_hat[k]), dither_S(a.times[k], c.dither))) < 1e-12);
}

TEST_CASE("first Euler step follows the closed-loop equations") {
  SimConfig c = reference_config(gradient_law(), 1.0);
  const Trajectory traj = simulate_full(c);
  // step 0: S(0) = 0 so Ghat = 0 and the relay rests
  CHECK(traj.u[0] == Vector{0.0, 0.0});
  CHECK(traj.theta_hat[1] == traj.theta_hat[0]);
  // step 1 -> 2 moves by dt * K Ghat/||Ghat||
  const Vector g = traj.g_hat[1];
  const Vector expect = add(traj.theta_hat[1], scaled(c.law.gain * scaled(g, 1.0 / norm(g)), c.dt));
  CHECK(max_abs(subtract(traj.theta_hat[2], expect)) < 1e-15);
}

TEST_CASE("output disturbance enters y additively") {
  SimConfig c = reference_config(gradient_law(), 1.0);
  const Trajectory base = simulate_full(c);
  c.output_disturbance = [](double) { return 0.0; };
  CHECK(simulate_full(c).y == base.y);
  c.output_disturbance = [](double t) { return 1e-3 * t; };
  const Trajectory d = simulate_full(c);
  CHECK(d.y[0] == base.y[0]);
  CHECK(d.y[10] != base.y[10]);
}

TEST_CASE("simulate_full validates its configuration") {
  SimConfig c = reference_config(gradient_law(), 10.0);
  SimConfig bad = c;
  bad.dither.ratios = {Rational(2), Rational(4)};  // 4 = 2 + 2
  CHECK_THROWS_AS(simulate_full(bad), ValidationError);

  bad = c;
  bad.law.gain = Matrix::identity(2) * 0.025;
  CHECK_THROWS_AS(simulate_full(bad), NotHurwitzError);

  bad = reference_config(newton_law(), 10.0);
  bad.law.gain = Matrix::identity(2) * -1.0;
  CHECK_THROWS_AS(simulate_full(bad), NotHurwitzError);

  bad = reference_config(newton_law(), 10.0);
  bad.law.gamma0 = Matrix(2, 2);
  CHECK_THROWS_AS(simulate_full(bad), SingularMatrixError);

  bad = c;
  bad.dt = 0.01;  // fastest dither period is 2 pi / 7 ~ 0.898
  CHECK_THROWS_AS(simulate_full(bad), ValidationError);

  bad = c;
  bad.t_end = c.dt / 2.0;
  CHECK_THROWS_AS(simulate_full(bad), ValidationError);

  bad = c;
  bad.theta_hat0 = {1.0};
  CHECK_THROWS_AS(simulate_full(bad), DimensionError);

  bad = c;
  bad.sample_every = 0;
  CHECK_THROWS_AS(simulate_full(bad), ValidationError);
}

TEST_CASE("unfiltered Newton loop diverges and reports the time") {
  const SimConfig c = reference_config(newton_law(), 1000.0);
  CHECK_THROWS_AS(simulate_full(c), SimulationError);
  const FullRun run = run_full(c);
  REQUIRE(run.error.has_value());
  CHECK(run.error->time() > 0.0);
  CHECK(run.error->time() < 1.0);
  CHECK(run.trajectory.size() >= 1);
  CHECK(run.trajectory.has_gamma());
  CHECK(run.trajectory.gamma[0] == c.law.gamma0);
}

TEST_CASE("step refinement is first-order consistent") {
  // The gradient scenario; the Newton full loop diverges, see README.
  SimConfig c = reference_config(gradient_law(), 100.0);
  const double base = default_step(c.dither);
  std::vector<Vector> finals;
  for (double scale : {1.0, 0.5, 0.25}) {
    c.dt = base * scale;
    finals.push_back(simulate_full(c).theta_hat.back());
  }
  const double e1 = norm(subtract(finals[0], finals[1]));
  const double e2 = norm(subtract(finals[1], finals[2]));
  CHECK(e2 < 2.0 * e1);
}

TEST_CASE("Riccati fixed point drifts by less than 1e-9 per step") {
  const Matrix h = reference_map().hessian;
  Matrix gamma = invert_small(h);
  for (int k = 0; k < 1000; ++k) {
    const Matrix next = gamma + riccati_rhs(gamma, h, 1.0) * default_step(reference_dither());
    CHECK(max_abs(next - gamma) <= 1e-9);
    gamma = next;
  }
}

TEST_CASE("averaged gradient system rests at the origin") {
  AverageScheme s;
  s.g_hat0 = {0.0, 0.0};
  const Trajectory traj = simulate_average(reference_map(), gradient_law(), s, 10.0, 0.01);
  for (const auto& g : traj.g_hat) CHECK(g == Vector{0.0, 0.0});
  for (const auto& u : traj.u) CHECK(u == Vector{0.0, 0.0});
}

TEST_CASE("scalar linearized Newton reaches zero at t = 1") {
  QuadraticMap m;
  m.q_star = 0.0;
  m.theta_star = {0.0};
  m.hessian = Matrix{{2.0}};
  ControllerLaw law;
  law.kind = LawKind::NewtonUVC;
  law.gain = Matrix{{1.0}};
  law.riccati_rate = 1.0;
  law.gamma0 = Matrix{{0.25}};
  for (double w : {0.5, 1.0, 3.0}) {
    AverageScheme s;
    s.kind = AverageKind::NewtonAvgLinearized;
    s.theta_tilde0 = {1.0};
    s.omega = w;
    const double dt = 1e-4;
    const Trajectory traj = simulate_average(m, law, s, 2.0, dt);
    std::optional<double> hit;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      // linear decay with unit slope until the hit
      if (traj.times[k] < 0.99) CHECK(std::abs(traj.theta_hat[k][0] - (1.0 - traj.times[k])) < 1e-4);
      if (!hit && std::abs(traj.theta_hat[k][0]) <= 1e-6) hit = traj.times[k];
    }
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(traj.theta_hat.back()[0]) == 0.0);
  }
}

TEST_CASE("linearized Gamma_tilde decays as exp(-w_r t)") {
  AverageScheme s;
  s.kind = AverageKind::NewtonAvgLinearized;
  s.theta_tilde0 = {2.5, 5.0};
  ControllerLaw law = newton_law();
  law.riccati_rate = 1.0;
  const QuadraticMap m = reference_map();
  const Trajectory traj = simulate_average(m, law, s, 5.0, 1e-4);
  const Matrix h_inv = invert_small(m.hessian);
  const double g0 = frobenius_norm(traj.gamma[0] - h_inv);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); k += 100) {
    const double ratio = frobenius_norm(traj.gamma[k] - h_inv) / (g0 * std::exp(-traj.times[k]));
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("averaged schemes validate against the law") {
  AverageScheme s;
  s.theta_tilde0 = {1.0, 1.0};
  s.kind = AverageKind::NewtonAvgFull;
  CHECK_THROWS_AS(simulate_average(reference_map(), gradient_law(), s, 1.0, 0.01), ValidationError);
  s.kind = AverageKind::GradientAvg;
  CHECK_THROWS_AS(simulate_average(reference_map(), newton_law(), s, 1.0, 0.01), ValidationError);
  s.theta_tilde0 = {};
  CHECK_THROWS_AS(simulate_average(reference_map(), gradient_law(), s, 1.0, 0.01), ValidationError);
  s.theta_tilde0 = {1.0};
  CHECK_THROWS_AS(simulate_average(reference_map(), gradient_law(), s, 1.0, 0.01), DimensionError);
}

TEST_CASE("averaged runs: finite-time for relays, exponential for proportional laws") {
  const SimConfig g = reference_config(gradient_law(), 400.0);
  AverageScheme s = average_scheme_for(g);
  CHECK(s.omega == doctest::Approx(1.0));
  const Trajectory tg = simulate_average(g.map, g.law, s, 400.0, 0.01);
  CHECK(decay_classifier(tg, SignalKind::ThetaTilde, g.map.theta_star).classification == DecayClass::FiniteTimeLinear);

  const SimConfig gp = reference_config(gradient_law(LawKind::GradientProportional), 400.0);
  const Trajectory tp = simulate_average(gp.map, gp.law, s, 400.0, 0.01);
  CHECK(decay_classifier(tp, SignalKind::ThetaTilde, g.map.theta_star).classification == DecayClass::Exponential);
}

TEST_CASE("compare_schemes: order, determinism, Newton faster on averaged runs") {
  const SimConfig g = reference_config(gradient_law(), 400.0);
  const SimConfig n = reference_config(newton_law(), 400.0);
  CompareOptions opts;
  opts.mode = CompareMode::Average;
  const auto rows = compare_schemes({g, n, g}, opts);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "gradient-uvc/average");
  CHECK(rows[1].label == "newton-uvc/average");
  REQUIRE(rows[0].onset.has_value());
  REQUIRE(rows[1].onset.has_value());
  CHECK(*rows[1].onset < *rows[0].onset);
  CHECK(rows[0].onset == rows[2].onset);
  CHECK(rows[0].final_theta_residual == rows[2].final_theta_residual);
  CHECK(rows[0].decay.linear_rms == rows[2].decay.linear_rms);
  CHECK(rows[0].component_onsets.size() == 2);

  SimConfig other = g;
  other.map.q_star = 1.0;
  CHECK_THROWS_AS(compare_schemes({g, other}, opts), ValidationError);
}

TEST_CASE("compare_schemes in full mode records divergence instead of throwing") {
  const SimConfig g = reference_config(gradient_law(), 50.0);
  const SimConfig n = reference_config(newton_law(), 50.0);
  const auto rows = compare_schemes({g, n});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].failure.has_value());
  CHECK(rows[1].failure.has_value());
}
