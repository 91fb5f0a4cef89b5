#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "uvesc/analysis.hpp"
#include "uvesc/config.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/signals.hpp"
#include "uvesc/sim.hpp"
#include "uvesc/trajectory_csv.hpp"

namespace uvesc::cli {

namespace {

struct Overrides {
  std::string scheme;
  std::optional<double> omega;
  std::optional<double> t_end;
  std::optional<double> dt;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--scheme", o.scheme, "Control law")
      ->check(CLI::IsMember({"gradient-uvc", "newton-uvc", "gradient-prop", "newton-prop"}));
  cmd->add_option("--omega", o.omega, "Base dither frequency w (rad/s)")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", o.t_end, "Horizon (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", o.dt, "Euler step (s)")->check(CLI::PositiveNumber);
}

void set_omega(Scenario& sc, double omega) {
  sc.sim.law.riccati_rate *= omega / sc.sim.dither.base_omega;  // keep w_r / w fixed
  sc.sim.dither.base_omega = omega;
  if (sc.default_dt) sc.sim.dt = default_step(sc.sim.dither);
}

Scenario load(const std::string& path, const Overrides& o, std::ostream& err) {
  Scenario sc = load_scenario(path);
  for (const auto& w : sc.warnings) err << "warning: " << w << '\n';
  if (!o.scheme.empty()) sc.sim.law.kind = parse_law_kind(o.scheme);
  if (o.omega) set_omega(sc, *o.omega);
  if (o.t_end) sc.sim.t_end = *o.t_end;
  if (o.dt) {
    sc.sim.dt = *o.dt;
    sc.default_dt = false;
  }
  return sc;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError("empty entry in list '" + text + "'");
    out.push_back(cell.substr(b, e - b + 1));
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

// Writes to the named file, or to `out` when path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot open " + path + " for writing");
  write(file);
}

std::string fmt(std::optional<double> v) {
  if (!v) return "none";
  std::ostringstream s;
  s << std::setprecision(10) << *v;
  return s.str();
}

int cmd_validate(const std::string& ratios, const std::string& config, std::ostream& out) {
  DitherSpec spec;
  if (!config.empty()) {
    spec = load_scenario(config).sim.dither;
  } else {
    for (const auto& r : split_list(ratios)) spec.ratios.push_back(parse_rational(r));
    spec.amplitudes.assign(spec.ratios.size(), 1.0);
  }
  const FrequencyReport report = validate_frequencies(spec);
  if (report.valid) {
    out << "valid\n";
    return 0;
  }
  out << "invalid\n";
  for (const auto& v : report.violations) out << describe(v, spec) << '\n';
  return 1;
}

int cmd_simulate(const Scenario& sc, const std::string& path, std::ostream& out, std::ostream& err) {
  FullRun run = run_full(sc.sim);
  emit(path, out, [&](std::ostream& os) { write_trajectory_csv(os, run.trajectory); });
  if (run.error) {
    err << "error: " << run.error->what() << " (" << run.trajectory.size() << " samples written)\n";
    return 1;
  }
  if (!path.empty() && path != "-") out << "wrote " << run.trajectory.size() << " samples to " << path << '\n';
  return 0;
}

int cmd_average(const Scenario& sc, bool linearized, const std::string& path, std::ostream& out) {
  AverageScheme scheme = average_scheme_for(sc.sim);
  scheme.boundary_layer = sc.boundary_layer;
  if (linearized) {
    if (scheme.kind != AverageKind::NewtonAvgFull) throw ValidationError("--linearized needs a Newton law");
    scheme.kind = AverageKind::NewtonAvgLinearized;
  }
  const Trajectory traj = simulate_average(sc.sim.map, sc.sim.law, scheme, sc.sim.t_end, sc.sim.dt);
  emit(path, out, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  if (!path.empty() && path != "-") out << "wrote " << traj.size() << " samples to " << path << '\n';
  return 0;
}

int cmd_bounds(const Scenario& sc, std::ostream& out) {
  const SimConfig& cfg = sc.sim;
  validate_config(cfg);
  const std::size_t n = cfg.map.dimension();
  const Matrix q = Matrix::identity(n);
  const bool newton = is_newton(cfg.law.kind);
  const LyapunovCertificate cert =
      newton ? newton_certificate(cfg.law.gain, q) : gradient_certificate(cfg.map.hessian, cfg.law.gain, q);
  const double w = averaging_frequency(cfg.dither);
  const Vector tt0 = subtract(cfg.theta_hat0, cfg.map.theta_star);
  const double h_norm = spectral_norm(cfg.map.hessian);

  out << std::setprecision(10);
  out << "certificate = " << (newton ? "newton (A = -K)" : "gradient (A = H* K)") << '\n';
  out << "lambda_min_p = " << cert.lambda_min_p << "\nlambda_max_p = " << cert.lambda_max_p << '\n';
  out << "lambda_min_q = " << cert.lambda_min_q << "\nlambda_max_q = " << cert.lambda_max_q << '\n';
  out << "lyapunov_residual = " << cert.residual() << '\n';
  out << "omega = " << w << '\n';

  double bound_original = 0.0;
  if (newton) {
    bound_original = settling_bound(cert, BoundForm::Newton, norm(tt0), w, TimeFrame::OriginalTime);
    out << "settling_bound_slow_time = " << settling_bound(cert, BoundForm::Newton, norm(tt0), w, TimeFrame::SlowTime)
        << '\n';
  } else {
    const double g0 = norm(cfg.map.hessian * tt0);
    bound_original = settling_bound(cert, BoundForm::Gradient, norm(tt0), w, TimeFrame::OriginalTime, h_norm);
    out << "settling_bound_slow_time = " << settling_bound(cert, BoundForm::Gradient, g0, w, TimeFrame::SlowTime)
        << '\n';
  }
  out << "settling_bound_original_time = " << bound_original << '\n';

  AverageScheme scheme = average_scheme_for(cfg);
  scheme.boundary_layer = sc.boundary_layer;
  if (newton) scheme.kind = AverageKind::NewtonAvgLinearized;
  CompareOptions opts;
  opts.mode = CompareMode::Average;
  const SummaryRow row =
      summarize(simulate_average(cfg.map, cfg.law, scheme, cfg.t_end, cfg.dt), cfg, opts);
  out << "measured_average_onset = " << fmt(row.onset) << '\n';
  if (row.onset) out << "measured_over_bound = " << *row.onset / bound_original << '\n';

  const ResidualBounds rb = residual_bounds(cfg.map, cfg.dither, cfg.dither.base_omega);
  out << "theta_residual = " << rb.theta_residual << "\ny_residual = " << rb.y_residual
      << "\ninverse_omega = " << rb.inverse_omega << '\n';
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const Overrides& o, const std::string& mode,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::vector<SimConfig> configs;
  for (const auto& p : paths) configs.push_back(load(p, o, err).sim);
  CompareOptions opts;
  opts.mode = mode == "average" ? CompareMode::Average : CompareMode::Full;
  const auto rows = compare_schemes(configs, opts);
  emit(out_path, out, [&](std::ostream& os) { write_summary_csv(os, rows); });
  for (const auto& r : rows)
    if (r.failure) err << "warning: " << r.label << ": " << *r.failure << '\n';
  return 0;
}

int cmd_sweep(const Scenario& base, const std::string& param, const std::string& values, const std::string& mode,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::vector<double> keys;
  for (const auto& v : split_list(values)) {
    try {
      keys.push_back(std::stod(v));
    } catch (const std::exception&) {
      throw ValidationError("bad sweep value '" + v + "'");
    }
  }
  CompareOptions opts;
  opts.mode = mode == "average" ? CompareMode::Average : CompareMode::Full;
  std::vector<SimConfig> batch;
  for (double k : keys) {
    Scenario sc = base;
    if (param == "omega") {
      set_omega(sc, k);
    } else {
      sc.sim.law.gain *= k;
    }
    batch.push_back(sc.sim);
  }
  const auto rows = run_batch(batch, opts);
  emit(out_path, out, [&](std::ostream& os) { write_summary_csv(os, rows, param, keys); });
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].failure) err << "warning: " << param << "=" << keys[i] << ": " << *rows[i].failure << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unit-vector extremum seeking simulator", "uvesc"};
  app.require_subcommand(1);
  app.fallthrough();
  long seed = 0;
  app.add_option("--seed", seed, "Reserved; every pipeline is deterministic");

  std::string ratios, config, out_path, mode = "full", param, values;
  std::vector<std::string> configs;
  bool linearized = false;
  Overrides o;

  auto* validate = app.add_subcommand("validate", "Check the dither frequency conditions");
  auto* r_opt = validate->add_option("--ratios", ratios, "Comma-separated frequency ratios, e.g. 70,50 or 7/2,5");
  validate->add_option("--config", config, "Scenario file")->excludes(r_opt);

  auto* simulate = app.add_subcommand("simulate", "Integrate the full dithered closed loop");
  simulate->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "Trajectory CSV (default stdout)");
  add_overrides(simulate, o);

  auto* average = app.add_subcommand("average", "Integrate the averaged closed loop");
  average->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  average->add_option("--out", out_path, "Trajectory CSV (default stdout)");
  average->add_flag("--linearized", linearized, "Newton laws: integrate the linearised averaged system");
  add_overrides(average, o);

  auto* compare = app.add_subcommand("compare", "Summary table for several scenarios on one map");
  compare->add_option("--config", configs, "Scenario files (repeatable)")->required()->check(CLI::ExistingFile);
  compare->add_option("--mode", mode, "full or average")->check(CLI::IsMember({"full", "average"}));
  compare->add_option("--out", out_path, "Summary CSV (default stdout)");
  add_overrides(compare, o);

  auto* bounds = app.add_subcommand("bounds", "Lyapunov certificate, settling and residual bounds");
  bounds->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  add_overrides(bounds, o);

  auto* sweep = app.add_subcommand("sweep", "One summary row per value of w or of a gain scale");
  sweep->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "omega or gain")->required()->check(CLI::IsMember({"omega", "gain"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--mode", mode, "full or average")->check(CLI::IsMember({"full", "average"}));
  sweep->add_option("--out", out_path, "Summary CSV (default stdout)");
  add_overrides(sweep, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (validate->parsed() && ratios.empty() && config.empty()) throw CLI::RequiredError("--ratios or --config");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(ratios, config, out);
    if (simulate->parsed()) return cmd_simulate(load(config, o, err), out_path, out, err);
    if (average->parsed()) return cmd_average(load(config, o, err), linearized, out_path, out);
    if (compare->parsed()) return cmd_compare(configs, o, mode, out_path, out, err);
    if (bounds->parsed()) return cmd_bounds(load(config, o, err), out);
    if (sweep->parsed()) return cmd_sweep(load(config, o, err), param, values, mode, out_path, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace uvesc::cli
