#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "chernlab/lab.hpp"

namespace py = pybind11;
using namespace chernlab;

namespace {

py::dict trajectory_columns(const std::vector<TrajectoryRow>& rows) {
  std::vector<double> t, mn, mx, pmin, pmax, dmin, dmax, tor, dtor, bmin, bmax, kd, rp, rl;
  for (const auto& r : rows) {
    t.push_back(r.t);
    mn.push_back(r.min_eig_g);
    mx.push_back(r.max_eig_g);
    pmin.push_back(r.psi_min);
    pmax.push_back(r.psi_max);
    dmin.push_back(r.psidot_min);
    dmax.push_back(r.psidot_max);
    tor.push_back(r.torsion_sup);
    dtor.push_back(r.dbar_torsion_sup);
    bmin.push_back(r.bk_min);
    bmax.push_back(r.bk_max);
    kd.push_back(r.kahler_defect);
    rp.push_back(r.res_psi_evo);
    rl.push_back(r.res_lambda_evo);
  }
  py::dict d;
  d["t"] = t;
  d["min_eig_g"] = mn;
  d["max_eig_g"] = mx;
  d["psi_min"] = pmin;
  d["psi_max"] = pmax;
  d["psidot_min"] = dmin;
  d["psidot_max"] = dmax;
  d["torsion_sup"] = tor;
  d["dbar_torsion_sup"] = dtor;
  d["bk_min"] = bmin;
  d["bk_max"] = bmax;
  d["kahler_defect"] = kd;
  d["res_psi_evo"] = rp;
  d["res_lambda_evo"] = rl;
  return d;
}

}  // namespace

PYBIND11_MODULE(_chernlab, m) {
  m.doc() = "Chern-Ricci flow numerical lab";

  py::enum_<Verdict>(m, "Verdict")
      .value("PASS", Verdict::pass)
      .value("FAIL", Verdict::fail)
      .value("INAPPLICABLE", Verdict::inapplicable);

  py::class_<MonitorRecord>(m, "MonitorRecord")
      .def_readonly("monitor", &MonitorRecord::monitor)
      .def_readonly("t", &MonitorRecord::t)
      .def_readonly("measured", &MonitorRecord::measured)
      .def_readonly("bound", &MonitorRecord::bound)
      .def_readonly("margin", &MonitorRecord::margin)
      .def_readonly("verdict", &MonitorRecord::verdict);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def("emit", [](const ScenarioConfig& c) { return emit_config(c); })
      .def("hash", [](const ScenarioConfig& c) { return config_hash(c); })
      .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
      .def_property_readonly("n", [](const ScenarioConfig& c) { return c.grid.n; })
      .def_property_readonly("N", [](const ScenarioConfig& c) { return c.grid.N; })
      .def_property_readonly("scheme", [](const ScenarioConfig& c) { return to_string(c.grid.scheme); })
      .def_property_readonly("integrator",
                             [](const ScenarioConfig& c) { return to_string(c.flow.integrator); })
      .def_property_readonly("family", [](const ScenarioConfig& c) { return to_string(c.metric.family); })
      .def_property_readonly("t_end", [](const ScenarioConfig& c) { return c.flow.t_end; });

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("config_hash", &RunRecord::config_hash)
      .def_readonly("monitors", &RunRecord::monitors)
      .def_readonly("broke_down", &RunRecord::broke_down)
      .def_readonly("breakdown_time", &RunRecord::breakdown_time)
      .def_readonly("exit_code", &RunRecord::exit_code)
      .def_property_readonly("trajectory",
                             [](const RunRecord& r) { return trajectory_columns(r.rows); })
      .def("write", [](const RunRecord& r, const std::filesystem::path& dir) { write_run(r, dir); },
           py::arg("directory"));

  m.def("run_scenario", &run_scenario, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<CutoffProfile>(m, "CutoffProfile")
      .def_readonly("kappa", &CutoffProfile::kappa)
      .def_readonly("a", &CutoffProfile::a)
      .def_readonly("b", &CutoffProfile::b)
      .def_readonly("s", &CutoffProfile::s)
      .def_readonly("F", &CutoffProfile::F)
      .def_readonly("F1", &CutoffProfile::F1)
      .def("value", &CutoffProfile::value)
      .def("derivative", &CutoffProfile::derivative)
      .def("write_csv",
           [](const CutoffProfile& p, const std::filesystem::path& path) { write_profile_csv(p, path); });

  m.def("build_profile", &build_profile, py::arg("kappa"), py::arg("nodes") = 20000);
  m.def("cutoff_f", &cutoff_f, py::arg("s"), py::arg("kappa"), py::arg("k") = 0);
  m.def("cutoff_phi", &cutoff_phi, py::arg("s"), py::arg("kappa"), py::arg("k") = 0);
  m.def(
      "weighted_sups",
      [](const CutoffProfile& p) {
        const auto c = check_profile(p);
        return py::make_tuple(c.weighted_sup[0], c.weighted_sup[1], c.weighted_sup[2], c.ok);
      },
      py::arg("profile"));

  m.def(
      "identity_report",
      [](int n, int N, const std::string& scheme, std::uint64_t seed) {
        py::dict d;
        for (const auto& [k, v] : identity_report(n, N, scheme_from_string(scheme), seed)) d[k.c_str()] = v;
        return d;
      },
      py::arg("n"), py::arg("N"), py::arg("scheme") = "spectral", py::arg("seed") = 1);
}
