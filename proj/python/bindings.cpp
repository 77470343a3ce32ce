#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "risuav/orchestrator.hpp"
#include "risuav/scenario.hpp"
#include "risuav/scheduling.hpp"

namespace py = pybind11;
using namespace risuav;

namespace {

using Point = std::array<double, 3>;

std::vector<Point> points(const std::vector<Vec3>& v) {
  std::vector<Point> out;
  for (const auto& p : v) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

OrchestratorOptions options(int threads, bool wall_clock) {
  OrchestratorOptions opt;
  opt.threads = threads;
  opt.wall_clock = wall_clock;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_risuav, m) {
  m.doc() = "Simulator and optimizer for RIS-assisted mmWave multi-UAV networks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  py::class_<NetworkScenario>(m, "Scenario")
      .def(py::init(&default_scenario))
      .def_static("from_json", [](const std::string& text) { return load_scenario(text); }, py::arg("text"))
      .def_static("from_file", &load_scenario_file, py::arg("path"))
      .def_readonly("num_uavs", &NetworkScenario::num_uavs)
      .def_readonly("num_users", &NetworkScenario::num_users)
      .def_readonly("num_slots", &NetworkScenario::num_slots)
      .def_readonly("num_ris", &NetworkScenario::num_ris)
      .def_readonly("power_w", &NetworkScenario::power_w)
      .def_readonly("noise_w", &NetworkScenario::noise_w)
      .def_readonly("min_rate", &NetworkScenario::min_rate)
      .def_readonly("step_m", &NetworkScenario::step_m)
      .def_readonly("seed", &NetworkScenario::seed)
      .def_readonly("timeblocks", &NetworkScenario::timeblocks)
      .def_property_readonly("antennas", &NetworkScenario::antennas)
      .def_property_readonly("ris_elements", &NetworkScenario::ris_elements)
      .def_property_readonly("uav_positions", [](const NetworkScenario& s) { return points(s.uav_init_pos); })
      .def_property_readonly("user_positions", [](const NetworkScenario& s) { return points(s.user_pos); })
      .def_property_readonly("ris_positions", [](const NetworkScenario& s) { return points(s.ris_pos); })
      .def("with_axis",
           [](const NetworkScenario& s, const std::string& axis, double value) {
             return apply_axis(s, parse_axis(axis), value);
           },
           py::arg("axis"), py::arg("value"));

  py::class_<TimeblockResult>(m, "TimeblockResult")
      .def_property_readonly("mode", [](const TimeblockResult& r) { return mode_name(r.mode); })
      .def_readonly("seed", &TimeblockResult::seed)
      .def_readonly("timeblock", &TimeblockResult::timeblock)
      .def_readonly("sum_rate", &TimeblockResult::sum_rate)
      .def_readonly("min_rate", &TimeblockResult::min_rate)
      .def_readonly("iterations", &TimeblockResult::iterations)
      .def_readonly("feasible", &TimeblockResult::feasible)
      .def_readonly("failing_user", &TimeblockResult::failing_user)
      .def_readonly("wall_ms", &TimeblockResult::wall_ms)
      .def_readonly("trace", &TimeblockResult::trace);

  py::class_<OracleReport>(m, "OracleReport")
      .def_readonly("instances", &OracleReport::instances)
      .def_readonly("mismatches", &OracleReport::mismatches)
      .def_readonly("max_gap", &OracleReport::max_gap)
      .def_readonly("failures", &OracleReport::failures);

  py::class_<SignTest>(m, "SignTest")
      .def_readonly("wins", &SignTest::wins)
      .def_readonly("losses", &SignTest::losses)
      .def_readonly("mean_difference", &SignTest::mean_difference)
      .def_readonly("p_value", &SignTest::p_value);

  m.def("modes", [] {
    std::vector<std::string> out;
    for (Mode mode : all_modes()) out.push_back(mode_name(mode));
    return out;
  });

  m.def(
      "run_experiment",
      [](const NetworkScenario& s, const std::string& mode, int timeblocks, int threads, bool wall_clock) {
        const Mode md = parse_mode(mode);
        py::gil_scoped_release release;
        return run_experiment(s, md, timeblocks, options(threads, wall_clock));
      },
      py::arg("scenario"), py::arg("mode") = "joint", py::arg("timeblocks") = 1, py::arg("threads") = 1,
      py::arg("wall_clock") = false);

  m.def(
      "sweep",
      [](const NetworkScenario& s, const std::string& axis, const std::vector<double>& values,
         const std::string& mode, int timeblocks, int threads) {
        const SweepAxis ax = parse_axis(axis);
        const Mode md = parse_mode(mode);
        py::gil_scoped_release release;
        std::vector<std::pair<double, std::vector<TimeblockResult>>> out;
        for (auto& g : sweep(s, ax, values, md, timeblocks, options(threads, false))) {
          out.emplace_back(g.value, std::move(g.results));
        }
        return out;
      },
      py::arg("scenario"), py::arg("axis"), py::arg("values"), py::arg("mode") = "joint", py::arg("timeblocks") = 1,
      py::arg("threads") = 1);

  m.def(
      "results_csv",
      [](const std::vector<TimeblockResult>& results) {
        std::ostringstream out;
        write_results_csv(out, results);
        return out.str();
      },
      py::arg("results"));

  m.def(
      "sweep_csv",
      [](const std::string& axis, const std::vector<std::pair<double, std::vector<TimeblockResult>>>& groups) {
        const SweepAxis ax = parse_axis(axis);
        std::vector<SweepGroup> gs;
        for (const auto& [value, results] : groups) gs.push_back({ax, value, results});
        std::ostringstream out;
        write_sweep_csv(out, gs);
        return out.str();
      },
      py::arg("axis"), py::arg("groups"));

  m.def(
      "oracle_check",
      [](int instances, std::uint64_t seed) {
        py::gil_scoped_release release;
        return oracle_check(instances, seed);
      },
      py::arg("instances") = 50, py::arg("seed") = 1);

  m.def("paired_sign_test", &paired_sign_test, py::arg("a"), py::arg("b"));
  m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
  m.def("no_blockage_probability", &no_blockage_probability, py::arg("elevation_deg"), py::arg("a") = 11.95,
        py::arg("b") = 0.14);
}
