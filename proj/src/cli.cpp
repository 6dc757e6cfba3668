#include "navfuse/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "navfuse/eval.hpp"
#include "navfuse/logio.hpp"
#include "navfuse/pipeline.hpp"
#include "navfuse/scenario.hpp"

namespace navfuse {

namespace {

namespace fsys = std::filesystem;
using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct StatRow {
  std::string label;
  ErrorStats s;
};

std::string stats_csv(const std::vector<StatRow>& rows, const std::vector<std::string>& header) {
  std::string out;
  for (const std::string& line : header) out += "# " + line + "\n";
  out += "series,count,mean_m,rms_m,max_m,two_sigma_m,frac_le_0.3,frac_le_1,frac_le_2\n";
  for (const StatRow& r : rows) {
    out += r.label;
    out += ',' + std::to_string(r.s.count);
    for (double v : {r.s.mean, r.s.rms, r.s.max, r.s.two_sigma, r.s.frac_below_030,
                     r.s.frac_below_100, r.s.frac_below_200}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string stats_text(const std::vector<StatRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-22s %8s %9s %9s %9s %9s %8s %8s %8s\n", "series", "count",
                "mean[m]", "rms[m]", "max[m]", "2sigma[m]", "<=0.3", "<=1.0", "<=2.0");
  out += buf;
  for (const StatRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-22s %8zu %9.3f %9.3f %9.3f %9.3f %8.3f %8.3f %8.3f\n",
                  r.label.c_str(), r.s.count, r.s.mean, r.s.rms, r.s.max, r.s.two_sigma,
                  r.s.frac_below_030, r.s.frac_below_100, r.s.frac_below_200);
    out += buf;
  }
  return out;
}

std::vector<StatRow> build_stat_rows(const std::string& prefix,
                                     const std::vector<ErrorSample>& errors,
                                     const std::vector<OutageWindow>& outages) {
  std::vector<StatRow> rows;
  rows.push_back({prefix + "3d_overall", summarize(errors_3d(errors))});
  rows.push_back({prefix + "2d_overall", summarize(horizontal_errors(errors))});
  for (std::size_t i = 0; i < outages.size(); ++i) {
    const OutageWindow& w = outages[i];
    rows.push_back({prefix + "3d_outage" + std::to_string(i + 1),
                    summarize_window(errors, false, w.start, w.start + w.duration)});
    rows.push_back({prefix + "2d_outage" + std::to_string(i + 1),
                    summarize_window(errors, true, w.start, w.start + w.duration)});
  }
  return rows;
}

std::string errors_csv(const std::vector<ErrorSample>& errors,
                       const std::vector<std::string>& header) {
  std::string out;
  for (const std::string& line : header) out += "# " + line + "\n";
  out += "t,de,dn,du,horiz,err3d\n";
  for (const ErrorSample& e : errors) {
    out += format_double(e.t);
    for (double v : {e.enu.x(), e.enu.y(), e.enu.z(), e.horiz, e.err3d}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<ErrorSample> parse_errors_csv(const std::string& text) {
  std::vector<ErrorSample> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    ErrorSample e;
    double de = 0, dn = 0, du = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &e.t, &de, &dn, &du, &e.horiz,
                    &e.err3d) != 6) {
      throw DataError("bad error-series row: " + line);
    }
    e.enu = Vector3d(de, dn, du);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string scenario = "reference";
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_simulate(const SimulateOpts& o) {
  Scenario sc;
  if (o.scenario == "reference") {
    sc = reference_scenario();
  } else {
    sc = parse_scenario(read_text_file(o.scenario));
  }
  if (o.seed_set) sc.seed = o.seed;

  const SimResult r = simulate(sc);
  fsys::create_directories(o.out);

  const std::string scen_text = serialize_scenario(sc);
  write_text_file(o.out + "/scenario.json", scen_text);
  const std::string scen_hash = hex64(fnv1a64(scen_text));

  const std::vector<std::string> hdr = {
      "generator=navfuse simulate",
      "scenario=" + sc.name,
      "seed=" + std::to_string(sc.seed),
      "scenario_hash=" + scen_hash,
  };

  SensorStreams streams;
  streams.imu = r.imu;
  streams.odo = r.odo;
  streams.fiveg.reserve(r.fiveg.size());
  for (const FivegRecord& rec : r.fiveg) streams.fiveg.push_back(rec.meas);

  write_text_file(o.out + "/stream.jsonl", serialize_streams(streams, hdr));
  write_text_file(o.out + "/truth.csv", serialize_truth(r.truth_ref, hdr));
  write_text_file(o.out + "/bs.csv", serialize_bs(r.bss, hdr));
  write_text_file(o.out + "/labels.csv", serialize_labels(r.fiveg, hdr));

  std::cout << "scenario '" << sc.name << "' -> " << o.out << "\n"
            << "  imu records:  " << streams.imu.size() << "\n"
            << "  odo records:  " << streams.odo.size() << "\n"
            << "  5g records:   " << streams.fiveg.size() << "\n"
            << "  base stations: " << r.bss.size() << "\n"
            << "  duration_s:   " << format_double(r.truth_ref.back().t) << "\n"
            << "  outages_s:";
  for (const OutageWindow& w : sc.outages) std::cout << ' ' << format_double(w.duration);
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------- run

struct RunOpts {
  std::string in;
  std::string out;
  std::string pipeline;
  bool no_bias_removal = false;
  bool no_stop = false;
  bool no_odo = false;
  double gate_chi2 = 0.0;
};

int cmd_run(const RunOpts& o) {
  const std::string stream_text = read_text_file(o.in + "/stream.jsonl");
  const std::string scen_text = read_text_file(o.in + "/scenario.json");
  const std::string truth_text = read_text_file(o.in + "/truth.csv");
  const std::string bs_text = read_text_file(o.in + "/bs.csv");

  const SensorStreams streams = parse_streams(stream_text);
  const Scenario sc = parse_scenario(scen_text);
  const std::vector<TruthSample> truth = parse_truth(truth_text);
  const std::vector<BaseStation> bss = parse_bs(bs_text);
  if (truth.empty()) throw DataError("truth.csv has no samples");

  const PipelineKind kind = pipeline_from_name(o.pipeline);
  RunOptions opt;
  opt.bias_removal = !o.no_bias_removal;
  opt.stop_mechanism = !o.no_stop;
  opt.use_odometer = !o.no_odo;
  opt.gate_chi2 = o.gate_chi2;
  opt.static_init = sc.initial_static;
  opt.sigma2_h = sc.fiveg.sigma2_h;
  opt.u_ue = sc.u_ue;
  opt.gamma = default_nlos_gamma(sc.fiveg.sigma_range, sc.fiveg.sigma_pwr);

  const NavState ref_init = truth.front().nav;
  const RunOutput ro = run_pipeline(kind, streams, bss, ref_init, sc.sensors, opt);
  const std::vector<ErrorSample> errors = error_series(ro.nav, truth);

  fsys::create_directories(o.out);
  const std::string stream_hash = hex64(fnv1a64(stream_text));
  const std::string scen_hash = hex64(fnv1a64(scen_text));
  const std::string truth_hash = hex64(fnv1a64(truth_text));

  std::string flags = std::string("bias_removal=") + (opt.bias_removal ? "on" : "off") +
                      " stop_mechanism=" + (opt.stop_mechanism ? "on" : "off") +
                      " odometer=" + (opt.use_odometer ? "on" : "off") +
                      " gate_chi2=" + format_double(opt.gate_chi2);
  const std::vector<std::string> hdr = {
      "generator=navfuse run",
      "pipeline=" + o.pipeline,
      "flags=" + flags,
      "scenario=" + sc.name,
      "scenario_hash=" + scen_hash,
      "stream_hash=" + stream_hash,
      "truth_hash=" + truth_hash,
  };

  write_text_file(o.out + "/estimates.csv", serialize_estimates(ro.rows, hdr));
  write_text_file(o.out + "/errors.csv", errors_csv(errors, hdr));
  const std::vector<StatRow> rows = build_stat_rows("", errors, sc.outages);
  write_text_file(o.out + "/stats.csv", stats_csv(rows, hdr));
  write_text_file(o.out + "/stats.txt", stats_text(rows));
  write_text_file(o.out + "/cdf.csv", serialize_cdf(cdf_points(horizontal_errors(errors)), hdr));
  write_text_file(o.out + "/scenario.json", scen_text);

  json rj;
  rj["pipeline"] = o.pipeline;
  rj["flags"] = {{"bias_removal", opt.bias_removal},
                 {"stop_mechanism", opt.stop_mechanism},
                 {"odometer", opt.use_odometer},
                 {"gate_chi2", opt.gate_chi2}};
  rj["scenario_name"] = sc.name;
  rj["scenario_hash"] = scen_hash;
  rj["stream_hash"] = stream_hash;
  rj["truth_hash"] = truth_hash;
  write_text_file(o.out + "/run.json", rj.dump(2) + "\n");

  std::cout << "pipeline " << o.pipeline << " on '" << sc.name << "' -> " << o.out << "\n"
            << stats_text(rows);
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareOpts {
  std::vector<std::string> runs;
  std::string out;
};

int cmd_compare(const CompareOpts& o) {
  if (o.runs.size() < 2) throw ConfigError("compare needs at least two run directories");

  struct Loaded {
    std::string label;
    std::string pipeline;
    std::string stream_hash;
    std::string scenario_hash;
    std::vector<ErrorSample> errors;
    std::vector<OutageWindow> outages;
  };
  std::vector<Loaded> loaded;
  for (const std::string& dir : o.runs) {
    Loaded l;
    json rj;
    try {
      rj = json::parse(read_text_file(dir + "/run.json"));
    } catch (const json::exception& e) {
      throw DataError(dir + "/run.json is not valid JSON: " + e.what());
    }
    l.pipeline = rj.value("pipeline", std::string("?"));
    l.stream_hash = rj.value("stream_hash", std::string());
    l.scenario_hash = rj.value("scenario_hash", std::string());
    l.errors = parse_errors_csv(read_text_file(dir + "/errors.csv"));
    const Scenario sc = parse_scenario(read_text_file(dir + "/scenario.json"));
    l.outages = sc.outages;
    l.label = fsys::path(dir).filename().string();
    if (l.label.empty()) l.label = dir;
    loaded.push_back(std::move(l));
  }
  for (std::size_t i = 1; i < loaded.size(); ++i) {
    if (loaded[i].stream_hash != loaded[0].stream_hash ||
        loaded[i].scenario_hash != loaded[0].scenario_hash) {
      throw DataError("refusing to compare runs over different inputs: " + loaded[i].label +
                      " vs " + loaded[0].label);
    }
  }

  std::vector<StatRow> rows;
  std::string cdf_out = "run,error_m,fraction\n";
  for (const Loaded& l : loaded) {
    const auto rs = build_stat_rows(l.label + ":", l.errors, l.outages);
    rows.insert(rows.end(), rs.begin(), rs.end());
    for (const auto& [v, f] : cdf_points(horizontal_errors(l.errors))) {
      cdf_out += l.label + ',' + format_double(v) + ',' + format_double(f) + '\n';
    }
  }

  const std::vector<std::string> hdr = {
      "generator=navfuse compare",
      "stream_hash=" + loaded[0].stream_hash,
      "scenario_hash=" + loaded[0].scenario_hash,
  };
  if (!o.out.empty()) {
    fsys::create_directories(o.out);
    write_text_file(o.out + "/compare_stats.csv", stats_csv(rows, hdr));
    write_text_file(o.out + "/compare_stats.txt", stats_text(rows));
    std::string cdf_hdr;
    for (const std::string& line : hdr) cdf_hdr += "# " + line + "\n";
    write_text_file(o.out + "/compare_cdf.csv", cdf_hdr + cdf_out);
  }
  std::cout << stats_text(rows);
  return 0;
}

// ---------------------------------------------------------------- stats

struct StatsOpts {
  std::string est;
  std::string truth;
  std::string out;
  std::string window;
};

int cmd_stats(const StatsOpts& o) {
  const std::vector<EstimateRow> rows = parse_estimates(read_text_file(o.est));
  const std::vector<TruthSample> truth = parse_truth(read_text_file(o.truth));
  std::vector<ErrorSample> errors = error_series(nav_from_rows(rows), truth);

  if (!o.window.empty()) {
    const auto colon = o.window.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("--window expects T0:T1 seconds");
    }
    double t0 = 0.0, t1 = 0.0;
    try {
      t0 = std::stod(o.window.substr(0, colon));
      t1 = std::stod(o.window.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("--window expects numeric T0:T1");
    }
    std::vector<ErrorSample> filtered;
    for (const ErrorSample& e : errors) {
      if (e.t >= t0 - 1e-9 && e.t <= t1 + 1e-9) filtered.push_back(e);
    }
    errors = std::move(filtered);
  }

  std::vector<StatRow> srows;
  srows.push_back({"3d", summarize(errors_3d(errors))});
  srows.push_back({"2d", summarize(horizontal_errors(errors))});

  if (!o.out.empty()) {
    fsys::create_directories(o.out);
    const std::vector<std::string> hdr = {"generator=navfuse stats",
                                          "estimates_hash=" + hex64(fnv1a64(read_text_file(o.est))),
                                          "truth_hash=" + hex64(fnv1a64(read_text_file(o.truth)))};
    write_text_file(o.out + "/stats.csv", stats_csv(srows, hdr));
    write_text_file(o.out + "/cdf.csv",
                    serialize_cdf(cdf_points(horizontal_errors(errors)), hdr));
  }
  std::cout << stats_text(srows);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("navfuse");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Loosely-coupled 5G mmWave / IMU / odometer navigation toolkit"};
  app.require_subcommand(1);

  SimulateOpts so;
  CLI::App* sim = app.add_subcommand("simulate", "Generate a scenario's sensor streams");
  sim->add_option("--scenario", so.scenario,
                  "Scenario JSON file, or 'reference' for the built-in loop");
  sim->add_option("--out", so.out, "Output directory")->required();
  sim->add_option("--seed", so.seed, "Seed override")->each([&](const std::string&) {
    so.seed_set = true;
  });

  RunOpts ro;
  CLI::App* run = app.add_subcommand("run", "Run one pipeline over simulated streams");
  run->add_option("--in", ro.in, "Directory produced by simulate")->required();
  run->add_option("--out", ro.out, "Output directory")->required();
  run->add_option("--pipeline", ro.pipeline, "ins-only | ins-odo | 5g-only-cv | 5g-obms")
      ->required();
  run->add_flag("--no-bias-removal", ro.no_bias_removal, "Disable initial static bias removal");
  run->add_flag("--no-stop-mechanism", ro.no_stop, "Disable the stationary freeze");
  run->add_flag("--no-odometer", ro.no_odo, "Disable odometer use entirely");
  run->add_option("--gate-chi2", ro.gate_chi2, "Innovation gate threshold (0 = off)");

  CompareOpts co;
  CLI::App* cmp = app.add_subcommand("compare", "Side-by-side statistics of completed runs");
  cmp->add_option("--runs", co.runs, "Two or more run directories")->required()->expected(-2);
  cmp->add_option("--out", co.out, "Output directory for combined tables");

  StatsOpts to;
  CLI::App* st = app.add_subcommand("stats", "Error statistics of one estimates file");
  st->add_option("--est", to.est, "estimates.csv")->required();
  st->add_option("--truth", to.truth, "truth.csv")->required();
  st->add_option("--out", to.out, "Optional output directory");
  st->add_option("--window", to.window, "Restrict to T0:T1 seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(so);
    if (run->parsed()) return cmd_run(ro);
    if (cmp->parsed()) return cmd_compare(co);
    if (st->parsed()) return cmd_stats(to);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace navfuse
