#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uvesc/analysis.hpp"
#include "uvesc/config.hpp"
#include "uvesc/errors.hpp"
#include "uvesc/signals.hpp"
#include "uvesc/sim.hpp"

namespace py = pybind11;
using namespace uvesc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array stack(const std::vector<Vector>& rows, std::size_t n) {
  Array out({rows.size(), n});
  double* p = out.mutable_data();
  for (const auto& r : rows) p = std::copy(r.begin(), r.end(), p);
  return out;
}

py::dict to_dict(const Trajectory& traj) {
  const std::size_t n = traj.dimension();
  py::dict d;
  d["t"] = Array(traj.times.size(), traj.times.data());
  d["theta"] = stack(traj.theta, n);
  d["theta_hat"] = stack(traj.theta_hat, n);
  d["y"] = Array(traj.y.size(), traj.y.data());
  d["g_hat"] = stack(traj.g_hat, n);
  d["u"] = stack(traj.u, n);
  if (traj.has_gamma()) {
    Array g({traj.gamma.size(), n, n});
    double* p = g.mutable_data();
    for (const auto& m : traj.gamma) p = std::copy(m.data().begin(), m.data().end(), p);
    d["gamma"] = g;
  }
  return d;
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict row_dict(const SummaryRow& r) {
  py::dict d;
  d["label"] = r.label;
  d["onset"] = opt(r.onset);
  d["time_to_y"] = opt(r.time_to_y);
  d["final_theta_residual"] = r.final_theta_residual;
  d["final_y_residual"] = r.final_y_residual;
  d["decay"] = std::string(to_string(r.decay.classification));
  py::list comps;
  for (const auto& c : r.component_onsets) comps.append(opt(c));
  d["component_onsets"] = comps;
  d["failure"] = r.failure ? py::cast(*r.failure) : py::none();
  return d;
}

DitherSpec ratios_spec(const std::vector<std::string>& ratios, double base_omega) {
  DitherSpec d;
  for (const auto& r : ratios) d.ratios.push_back(parse_rational(r));
  d.amplitudes.assign(d.ratios.size(), 1.0);
  d.base_omega = base_omega;
  return d;
}

Scenario apply(Scenario sc, const std::optional<std::string>& scheme, std::optional<double> t_end,
               std::optional<double> dt) {
  if (scheme) sc.sim.law.kind = parse_law_kind(*scheme);
  if (t_end) sc.sim.t_end = *t_end;
  if (dt) sc.sim.dt = *dt;
  return sc;
}

}  // namespace

PYBIND11_MODULE(_uvesc, m) {
  m.doc() = "Unit-vector gradient and Newton extremum seeking on quadratic maps.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NotHurwitzError>(m, "NotHurwitzError", base.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
  py::register_exception<SimulationError>(m, "SimulationError", base.ptr());

  m.def(
      "validate_frequencies",
      [](const std::vector<std::string>& ratios) {
        const DitherSpec spec = ratios_spec(ratios, 1.0);
        const FrequencyReport r = validate_frequencies(spec);
        std::vector<std::string> lines;
        for (const auto& v : r.violations) lines.push_back(describe(v, spec));
        return py::make_tuple(r.valid, lines);
      },
      py::arg("ratios"), "Returns (valid, violation descriptions). Ratios are strings such as '70' or '7/2'.");

  m.def(
      "common_period",
      [](const std::vector<std::string>& ratios, double base_omega) {
        return common_period(ratios_spec(ratios, base_omega));
      },
      py::arg("ratios"), py::arg("base_omega") = 1.0);

  m.def(
      "solve_lyapunov",
      [](const Array& a, const Array& q) {
        const LyapunovCertificate c = solve_lyapunov(to_matrix(a), to_matrix(q));
        py::dict d;
        d["p"] = from_matrix(c.p_matrix);
        d["lambda_min_p"] = c.lambda_min_p;
        d["lambda_max_p"] = c.lambda_max_p;
        d["residual"] = c.residual();
        return d;
      },
      py::arg("a"), py::arg("q"), "Solves A^T P + P A = -Q; raises NotHurwitzError unless P is positive definite.");

  m.def(
      "detect_sliding",
      [](const std::vector<double>& t, const std::vector<double>& s, double tol, double window) {
        return opt(detect_sliding(t, s, tol, window));
      },
      py::arg("t"), py::arg("s"), py::arg("tol"), py::arg("window"));

  m.def(
      "decay_classifier",
      [](const std::vector<double>& t, const std::vector<double>& s) {
        const DecayFit f = decay_classifier(t, s);
        return py::make_tuple(std::string(to_string(f.classification)), f.linear_rms, f.exponential_rms);
      },
      py::arg("t"), py::arg("s"));

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("kind", [](const Scenario& s) { return std::string(to_string(s.sim.law.kind)); })
      .def_property_readonly("t_end", [](const Scenario& s) { return s.sim.t_end; })
      .def_property_readonly("dt", [](const Scenario& s) { return s.sim.dt; })
      .def_property_readonly("theta_star", [](const Scenario& s) { return s.sim.map.theta_star; })
      .def_property_readonly("hessian", [](const Scenario& s) { return from_matrix(s.sim.map.hessian); })
      .def_property_readonly("gain", [](const Scenario& s) { return from_matrix(s.sim.law.gain); })
      .def_readonly("warnings", &Scenario::warnings);

  m.def("load_scenario", &load_scenario, py::arg("path"));

  m.def(
      "simulate",
      [](const Scenario& sc, std::optional<std::string> scheme, std::optional<double> t_end,
         std::optional<double> dt) {
        const Scenario s = apply(sc, scheme, t_end, dt);
        FullRun run;
        {
          py::gil_scoped_release release;
          run = run_full(s.sim);
        }
        if (run.error) throw *run.error;
        return to_dict(run.trajectory);
      },
      py::arg("scenario"), py::kw_only(), py::arg("scheme") = py::none(), py::arg("t_end") = py::none(),
      py::arg("dt") = py::none(), "Full dithered closed loop; raises SimulationError on divergence.");

  m.def(
      "average",
      [](const Scenario& sc, bool linearized, std::optional<std::string> scheme, std::optional<double> t_end,
         std::optional<double> dt) {
        const Scenario s = apply(sc, scheme, t_end, dt);
        AverageScheme a = average_scheme_for(s.sim);
        a.boundary_layer = s.boundary_layer;
        if (linearized) {
          if (a.kind != AverageKind::NewtonAvgFull) throw ValidationError("linearized needs a Newton law");
          a.kind = AverageKind::NewtonAvgLinearized;
        }
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = simulate_average(s.sim.map, s.sim.law, a, s.sim.t_end, s.sim.dt);
        }
        return to_dict(traj);
      },
      py::arg("scenario"), py::arg("linearized") = false, py::kw_only(), py::arg("scheme") = py::none(),
      py::arg("t_end") = py::none(), py::arg("dt") = py::none());

  m.def(
      "compare",
      [](const std::vector<Scenario>& scenarios, const std::string& mode) {
        std::vector<SimConfig> configs;
        for (const auto& s : scenarios) configs.push_back(s.sim);
        CompareOptions opts;
        if (mode != "full" && mode != "average") throw ValidationError("mode must be 'full' or 'average'");
        opts.mode = mode == "average" ? CompareMode::Average : CompareMode::Full;
        std::vector<SummaryRow> rows;
        {
          py::gil_scoped_release release;
          rows = compare_schemes(configs, opts);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("scenarios"), py::arg("mode") = "full");
}
