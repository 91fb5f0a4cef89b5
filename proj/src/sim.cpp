#include "uvesc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>

#include "uvesc/control.hpp"
#include "uvesc/estimation.hpp"
#include "uvesc/plant.hpp"
#include "uvesc/signals.hpp"

namespace uvesc {

namespace {

constexpr double kOverflow = 1e100;

bool finite_and_bounded(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && std::abs(x) < kOverflow; });
}

void require_hurwitz(const QuadraticMap& map, const ControllerLaw& law) {
  if (is_newton(law.kind)) {
    if (!is_hurwitz(law.gain * -1.0)) throw NotHurwitzError("-K is not Hurwitz");
  } else if (!is_hurwitz(map.hessian * law.gain)) {
    throw NotHurwitzError("H* K is not Hurwitz");
  }
}

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw ValidationError("t_end must be finite and at least dt");
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

void record(Trajectory& traj, double t, const Vector& theta_hat, const Vector& theta, double y, const Vector& g,
            const Vector& u, const Matrix* gamma) {
  traj.times.push_back(t);
  traj.theta_hat.push_back(theta_hat);
  traj.theta.push_back(theta);
  traj.y.push_back(y);
  traj.g_hat.push_back(g);
  traj.u.push_back(u);
  if (gamma) traj.gamma.push_back(*gamma);
}

}  // namespace

double default_step(const DitherSpec& spec) { return common_period(spec) / 2000.0; }

void validate_config(const SimConfig& config) {
  config.map.validate();
  config.dither.validate();
  const std::size_t n = config.map.dimension();
  if (config.dither.dimension() != n) throw DimensionError("dither dimension differs from map dimension");
  if (config.theta_hat0.size() != n) throw DimensionError("theta_hat0 dimension differs from map dimension");
  config.law.validate(n);
  if (config.sample_every == 0) throw ValidationError("sample_every must be positive");

  const FrequencyReport report = validate_frequencies(config.dither);
  if (!report.valid) {
    std::string msg = "dither frequencies violate the probing conditions";
    for (const auto& v : report.violations) msg += "; " + describe(v, config.dither);
    throw ValidationError(msg);
  }
  require_hurwitz(config.map, config.law);

  step_count(config.t_end, config.dt);
  const Vector w = config.dither.frequencies();
  const double min_period = 2.0 * std::numbers::pi / *std::max_element(w.begin(), w.end());
  if (config.dt > min_period / 100.0)
    throw ValidationError("dt = " + std::to_string(config.dt) + " exceeds the smallest dither period / 100 = " +
                          std::to_string(min_period / 100.0));
}

FullRun run_full(const SimConfig& config) {
  validate_config(config);
  const std::size_t n = config.map.dimension();
  const bool newton = is_newton(config.law.kind);
  const DitherGenerator gen(config.dither);
  const std::size_t steps = step_count(config.t_end, config.dt);
  const double dt = config.dt;
  const double omega_r = config.law.riccati_rate;

  FullRun run;
  Trajectory& traj = run.trajectory;
  traj.reserve(steps / config.sample_every + 1, newton);

  Vector theta_hat = config.theta_hat0;
  Vector theta(n), s(n), m(n), g(n);
  Matrix gamma = newton ? config.law.gamma0 : Matrix();
  Matrix n_mat;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    gen.perturbation_and_demodulation(t, s, m);
    for (std::size_t i = 0; i < n; ++i) theta[i] = theta_hat[i] + s[i];
    double y = evaluate_map(config.map, theta);
    if (config.output_disturbance) y += config.output_disturbance(t);
    for (std::size_t i = 0; i < n; ++i) g[i] = m[i] * y;
    const Vector u = control_input(config.law, g, gamma);

    if (!std::isfinite(y) || !finite_and_bounded(g) || !finite_and_bounded(u) || !finite_and_bounded(theta_hat) ||
        (newton && !finite_and_bounded(gamma.data()))) {
      run.error.emplace(newton ? "non-finite or overflowing state (Riccati filter diverged)"
                               : "non-finite or overflowing state",
                        t);
      break;
    }
    if (k % config.sample_every == 0) record(traj, t, theta_hat, theta, y, g, u, newton ? &gamma : nullptr);
    if (k == steps) break;

    for (std::size_t i = 0; i < n; ++i) theta_hat[i] += dt * u[i];
    if (newton) {
      gen.hessian_demodulation(t, n_mat);
      n_mat *= y;
      gamma += riccati_rhs(gamma, n_mat, omega_r) * dt;
    }
  }
  return run;
}

Trajectory simulate_full(const SimConfig& config) {
  FullRun run = run_full(config);
  if (run.error) throw *run.error;
  return std::move(run.trajectory);
}

std::string_view to_string(AverageKind kind) {
  switch (kind) {
    case AverageKind::GradientAvg: return "gradient_avg";
    case AverageKind::NewtonAvgFull: return "newton_avg_full";
    case AverageKind::NewtonAvgLinearized: return "newton_avg_linearized";
  }
  return "unknown";
}

Trajectory simulate_average(const QuadraticMap& map, const ControllerLaw& law, const AverageScheme& scheme,
                            double t_end, double dt) {
  map.validate();
  const std::size_t n = map.dimension();
  law.validate(n);
  const bool newton_scheme = scheme.kind != AverageKind::GradientAvg;
  if (newton_scheme != is_newton(law.kind))
    throw ValidationError(std::string("average scheme ") + std::string(to_string(scheme.kind)) +
                          " does not match law kind " + std::string(to_string(law.kind)));
  require_hurwitz(map, law);
  if (!(scheme.omega > 0.0)) throw ValidationError("average scheme omega must be positive");
  if (!(scheme.boundary_layer >= 0.0)) throw ValidationError("boundary_layer must be non-negative");
  if (scheme.sample_every == 0) throw ValidationError("sample_every must be positive");
  const std::size_t steps = step_count(t_end, dt);

  const Matrix h_inv = invert_small(map.hessian);
  Vector tt;
  if (!scheme.theta_tilde0.empty()) {
    tt = scheme.theta_tilde0;
  } else if (!scheme.g_hat0.empty()) {
    if (scheme.g_hat0.size() != n) throw DimensionError("g_hat0 dimension differs from map dimension");
    tt = h_inv * scheme.g_hat0;
  } else {
    throw ValidationError("average scheme needs theta_tilde0 or g_hat0");
  }
  if (tt.size() != n) throw DimensionError("theta_tilde0 dimension differs from map dimension");

  Matrix gt;
  if (newton_scheme) {
    gt = scheme.gamma_tilde0.empty() ? law.gamma0 - h_inv : scheme.gamma_tilde0;
    if (gt.rows() != n || gt.cols() != n) throw DimensionError("gamma_tilde0 must be n x n");
  }

  const double w = scheme.omega;
  const double dtbar = w * dt;
  const bool unit_vector = is_unit_vector(law.kind);
  const double sign = newton_scheme ? -1.0 : 1.0;
  const double eps_b = scheme.boundary_layer;
  const Matrix identity = Matrix::identity(n);

  Trajectory traj;
  traj.reserve(steps / scheme.sample_every + 1, newton_scheme);
  bool pinned = false;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;

    // Relay argument of the averaged law.
    Vector v;
    switch (scheme.kind) {
      case AverageKind::GradientAvg: v = map.hessian * tt; break;
      case AverageKind::NewtonAvgFull: v = (identity + gt * map.hessian) * tt; break;
      case AverageKind::NewtonAvgLinearized: v = tt; break;
    }

    Vector rate(n, 0.0);  // d theta_tilde / d tbar
    if (unit_vector) {
      const double nv = norm(v);
      if (!pinned && nv > law.relay_guard) rate = law.gain * scaled(v, sign / (w * (nv + eps_b)));
    } else {
      rate = law.gain * scaled(v, sign / w);
    }
    Matrix gamma_rate;
    if (scheme.kind == AverageKind::NewtonAvgFull) gamma_rate = (gt + gt * map.hessian * gt) * (-law.riccati_rate / w);
    if (scheme.kind == AverageKind::NewtonAvgLinearized) gamma_rate = gt * (-law.riccati_rate / w);

    if (!finite_and_bounded(tt) || !finite_and_bounded(rate) || (newton_scheme && !finite_and_bounded(gt.data())))
      throw SimulationError("non-finite or overflowing averaged state", t);

    if (k % scheme.sample_every == 0) {
      const Vector theta = add(map.theta_star, tt);
      const double y = evaluate_map(map, theta);
      const Vector g = map.hessian * tt;
      const Vector u = scaled(rate, w);
      if (newton_scheme) {
        const Matrix gamma = h_inv + gt;
        record(traj, t, theta, theta, y, g, u, &gamma);
      } else {
        record(traj, t, theta, theta, y, g, u, nullptr);
      }
    }
    if (k == steps) break;

    if (unit_vector && !pinned) {
      const Vector step = scaled(rate, dtbar);
      const double nt = norm(tt);
      if (nt < eps_b || (nt > 0.0 && nt <= norm(step))) {
        pinned = true;
        std::fill(tt.begin(), tt.end(), 0.0);
      } else {
        for (std::size_t i = 0; i < n; ++i) tt[i] += step[i];
      }
    } else if (!unit_vector) {
      for (std::size_t i = 0; i < n; ++i) tt[i] += dtbar * rate[i];
    }
    if (newton_scheme) gt += gamma_rate * dtbar;
  }
  return traj;
}

AverageScheme average_scheme_for(const SimConfig& config) {
  AverageScheme scheme;
  scheme.kind = is_newton(config.law.kind) ? AverageKind::NewtonAvgFull : AverageKind::GradientAvg;
  scheme.theta_tilde0 = subtract(config.theta_hat0, config.map.theta_star);
  scheme.omega = averaging_frequency(config.dither);
  scheme.sample_every = config.sample_every;
  return scheme;
}

namespace {

double initial_rms(std::span<const double> times, std::span<const double> values, double window) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size() && times[k] <= times.front() + window * (1.0 + 1e-12); ++k) {
    sum += values[k] * values[k];
    ++count;
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

std::optional<double> onset_of(std::span<const double> times, std::span<const double> values, double tol,
                               double window) {
  if (times.size() < 2 || times.back() - times.front() < window) return std::nullopt;
  return detect_sliding(times, values, tol, window);
}

bool same_problem(const SimConfig& a, const SimConfig& b) {
  return a.map.q_star == b.map.q_star && a.map.theta_star == b.map.theta_star && a.map.hessian == b.map.hessian &&
         a.dither.amplitudes == b.dither.amplitudes && a.dither.ratios == b.dither.ratios &&
         a.dither.base_omega == b.dither.base_omega;
}

}  // namespace

SummaryRow summarize(const Trajectory& traj, const SimConfig& config, const CompareOptions& options) {
  SummaryRow row;
  row.label = std::string(to_string(config.law.kind)) + (options.mode == CompareMode::Full ? "/full" : "/average");
  if (traj.size() == 0) return row;
  const auto& theta_star = config.map.theta_star;
  const std::size_t n = traj.dimension();

  if (options.mode == CompareMode::Full) {
    const double window = common_period(config.dither);
    const Vector s = signal_norms(traj, SignalKind::GHat);
    row.onset = onset_of(traj.times, s, options.onset_fraction * initial_rms(traj.times, s, window), window);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector c = signal_component(traj, SignalKind::GHat, i);
      row.component_onsets.push_back(
          onset_of(traj.times, c, options.onset_fraction * initial_rms(traj.times, c, window), window));
    }
  } else {
    const double tol = options.average_tol.value_or(config.dt * spectral_norm(config.law.gain));
    const Vector s = signal_norms(traj, SignalKind::ThetaTilde, theta_star);
    row.onset = onset_of(traj.times, s, tol, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      row.component_onsets.push_back(
          onset_of(traj.times, signal_component(traj, SignalKind::ThetaTilde, i, theta_star), tol, 0.0));
  }

  std::size_t k = traj.size();
  while (k > 0 && std::abs(traj.y[k - 1] - config.map.q_star) <= options.y_threshold) --k;
  if (k < traj.size()) row.time_to_y = traj.times[k];

  row.final_theta_residual = norm(subtract(traj.theta_hat.back(), theta_star));
  row.final_y_residual = std::abs(traj.y.back() - config.map.q_star);
  row.decay = decay_classifier(traj, SignalKind::ThetaTilde, theta_star);
  return row;
}

std::vector<SummaryRow> run_batch(const std::vector<SimConfig>& configs, const CompareOptions& options) {
  std::vector<std::future<SummaryRow>> jobs;
  jobs.reserve(configs.size());
  for (const auto& config : configs) {
    jobs.push_back(std::async(std::launch::async, [&config, &options] {
      if (options.mode == CompareMode::Average) {
        const Trajectory traj =
            simulate_average(config.map, config.law, average_scheme_for(config), config.t_end, config.dt);
        return summarize(traj, config, options);
      }
      FullRun run = run_full(config);
      SummaryRow row = summarize(run.trajectory, config, options);
      if (run.error) row.failure = run.error->what();
      return row;
    }));
  }
  std::vector<SummaryRow> rows;
  rows.reserve(jobs.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

std::vector<SummaryRow> compare_schemes(const std::vector<SimConfig>& configs, const CompareOptions& options) {
  for (const auto& c : configs)
    if (!same_problem(c, configs.front())) throw ValidationError("compare_schemes: configs must share map and dither");
  return run_batch(configs, options);
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::string& key_header,
                       const std::vector<double>& keys) {
  const std::size_t n = rows.empty() ? 0 : rows.front().component_onsets.size();
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  if (!key_header.empty()) os << key_header << ',';
  os << "label,onset,time_to_y,final_theta_residual,final_y_residual,decay,linear_rms,exponential_rms";
  for (std::size_t i = 0; i < n; ++i) os << ",onset_" << i + 1;
  os << ",failure\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const SummaryRow& row = rows[r];
    if (!key_header.empty()) os << (r < keys.size() ? std::to_string(keys[r]) : std::string()) << ',';
    os << row.label << ',' << opt(row.onset) << ',' << opt(row.time_to_y) << ',' << row.final_theta_residual << ','
       << row.final_y_residual << ',' << to_string(row.decay.classification) << ',' << row.decay.linear_rms << ','
       << row.decay.exponential_rms;
    for (std::size_t i = 0; i < n; ++i) os << ',' << (i < row.component_onsets.size() ? opt(row.component_onsets[i]) : "");
    std::string failure = row.failure.value_or("");
    std::replace(failure.begin(), failure.end(), ',', ';');
    os << ',' << failure << '\n';
  }
}

}  // namespace uvesc
