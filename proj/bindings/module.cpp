#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "navfuse/cli.hpp"
#include "navfuse/eval.hpp"
#include "navfuse/frames.hpp"
#include "navfuse/logio.hpp"
#include "navfuse/pipeline.hpp"
#include "navfuse/scenario.hpp"

namespace py = pybind11;
using namespace navfuse;

namespace {

py::dict simulate_py(const std::string& scenario_json) {
  const Scenario sc = parse_scenario(scenario_json);
  const SimResult r = simulate(sc);
  SensorStreams streams;
  streams.imu = r.imu;
  streams.odo = r.odo;
  for (const FivegRecord& rec : r.fiveg) streams.fiveg.push_back(rec.meas);

  py::dict out;
  out["scenario_json"] = serialize_scenario(sc);
  out["stream_jsonl"] = serialize_streams(streams, {});
  out["truth_csv"] = serialize_truth(r.truth_ref, {});
  out["bs_csv"] = serialize_bs(r.bss, {});
  out["labels_csv"] = serialize_labels(r.fiveg, {});
  return out;
}

py::dict run_py(const std::string& pipeline, const std::string& stream_jsonl,
                const std::string& bs_csv, const std::string& truth_csv,
                const std::string& scenario_json, bool bias_removal, bool stop_mechanism,
                bool use_odometer, double gate_chi2) {
  const SensorStreams streams = parse_streams(stream_jsonl);
  const std::vector<BaseStation> bss = parse_bs(bs_csv);
  const std::vector<TruthSample> truth = parse_truth(truth_csv);
  const Scenario sc = parse_scenario(scenario_json);
  if (truth.empty()) throw DataError("truth has no samples");

  RunOptions opt;
  opt.bias_removal = bias_removal;
  opt.stop_mechanism = stop_mechanism;
  opt.use_odometer = use_odometer;
  opt.gate_chi2 = gate_chi2;
  opt.static_init = sc.initial_static;
  opt.sigma2_h = sc.fiveg.sigma2_h;
  opt.u_ue = sc.u_ue;
  opt.gamma = default_nlos_gamma(sc.fiveg.sigma_range, sc.fiveg.sigma_pwr);

  const RunOutput ro =
      run_pipeline(pipeline_from_name(pipeline), streams, bss, truth.front().nav, sc.sensors, opt);
  const std::vector<ErrorSample> errors = error_series(ro.nav, truth);
  const ErrorStats s3 = summarize(errors_3d(errors));
  const ErrorStats s2 = summarize(horizontal_errors(errors));

  py::dict out;
  out["estimates_csv"] = serialize_estimates(ro.rows, {});
  auto stats_dict = [](const ErrorStats& s) {
    py::dict d;
    d["count"] = s.count;
    d["mean"] = s.mean;
    d["rms"] = s.rms;
    d["max"] = s.max;
    d["two_sigma"] = s.two_sigma;
    d["frac_le_030"] = s.frac_below_030;
    d["frac_le_100"] = s.frac_below_100;
    d["frac_le_200"] = s.frac_below_200;
    return d;
  };
  out["stats_3d"] = stats_dict(s3);
  out["stats_2d"] = stats_dict(s2);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Loosely-coupled 5G mmWave / IMU / odometer navigation toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("reference_scenario_json", [] { return serialize_scenario(reference_scenario()); },
        "Built-in urban-loop scenario as a JSON string");
  m.def("simulate", &simulate_py, py::arg("scenario_json"),
        "Simulate a scenario; returns serialized streams, truth, base stations and labels");
  m.def("run", &run_py, py::arg("pipeline"), py::arg("stream_jsonl"), py::arg("bs_csv"),
        py::arg("truth_csv"), py::arg("scenario_json"), py::arg("bias_removal") = true,
        py::arg("stop_mechanism") = true, py::arg("use_odometer") = true,
        py::arg("gate_chi2") = 0.0,
        "Run one pipeline over serialized streams; returns estimates and error statistics");
  m.def("cli_main", [](const std::vector<std::string>& args) { return run_cli(args); },
        py::arg("args"), "Invoke the command-line interface; returns its exit code");

  m.def("wrap_azimuth", &wrap_azimuth, py::arg("angle_rad"),
        "Wrap an angle into the azimuth range [0, 2*pi)");
  m.def("meridian_radius",
        [](double lat) { return radii(EarthModel{}, lat).M; }, py::arg("lat_rad"));
  m.def("normal_radius",
        [](double lat) { return radii(EarthModel{}, lat).N; }, py::arg("lat_rad"));
  m.def(
      "geodetic_to_enu",
      [](double lat0, double lon0, double h0, double lat, double lon, double h) {
        const LocalEnu v =
            geodetic_to_enu(EarthModel{}, Geodetic{lat0, lon0, h0}, Geodetic{lat, lon, h});
        return py::make_tuple(v.e, v.n, v.u);
      },
      py::arg("lat0"), py::arg("lon0"), py::arg("h0"), py::arg("lat"), py::arg("lon"),
      py::arg("h"), "Small-offset East/North/Up coordinates of (lat,lon,h) about an anchor");
}
