#include "navfuse/logio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace navfuse {

using json = nlohmann::ordered_json;

namespace {

void append_header(std::string& out, const std::vector<std::string>& header) {
  for (const std::string& line : header) {
    out += "# ";
    out += line;
    out += '\n';
  }
}

double parse_num(std::string_view sv, const char* what) {
  double v = 0.0;
  const char* begin = sv.data();
  const char* end = sv.data() + sv.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc()) {
    throw DataError(std::string("bad numeric field in ") + what + ": '" + std::string(sv) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

bool data_line(std::string_view line) {
  if (line.empty()) return false;
  if (line.front() == '#') return false;
  const char c = line.front();
  return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line);
    start = end + 1;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("read failure: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failure: " + path);
}

std::uint64_t fnv1a64_file(const std::string& path) { return fnv1a64(read_text_file(path)); }

std::string serialize_streams(const SensorStreams& s, const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);

  struct Rec {
    double t;
    int rank;  // imu < odo < 5g at equal timestamps
    std::size_t idx;
  };
  std::vector<Rec> order;
  order.reserve(s.imu.size() + s.odo.size() + s.fiveg.size());
  for (std::size_t i = 0; i < s.imu.size(); ++i) order.push_back({s.imu[i].t, 0, i});
  for (std::size_t i = 0; i < s.odo.size(); ++i) order.push_back({s.odo[i].t, 1, i});
  for (std::size_t i = 0; i < s.fiveg.size(); ++i) order.push_back({s.fiveg[i].t, 2, i});
  std::stable_sort(order.begin(), order.end(), [](const Rec& a, const Rec& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.rank < b.rank;
  });

  for (const Rec& r : order) {
    out += "{\"t\":";
    switch (r.rank) {
      case 0: {
        const ImuSample& m = s.imu[r.idx];
        out += format_double(m.t);
        out += ",\"type\":\"imu\",\"f\":[";
        out += format_double(m.f_b.x()) + "," + format_double(m.f_b.y()) + "," +
               format_double(m.f_b.z());
        out += "],\"w\":[";
        out += format_double(m.w_b.x()) + "," + format_double(m.w_b.y()) + "," +
               format_double(m.w_b.z());
        out += "]}";
        break;
      }
      case 1: {
        const OdoSample& m = s.odo[r.idx];
        out += format_double(m.t);
        out += ",\"type\":\"odo\",\"v\":";
        out += format_double(m.v_odo);
        out += "}";
        break;
      }
      default: {
        const FivegMeasurement& m = s.fiveg[r.idx];
        out += format_double(m.t);
        out += ",\"type\":\"5g\",\"bs\":";
        out += std::to_string(m.bs_id);
        out += ",\"rtt_range_m\":";
        out += format_double(m.rtt_range);
        out += ",\"aod_rad\":";
        out += format_double(m.aod);
        out += ",\"pwr_range_m\":";
        out += format_double(m.rx_power_range);
        out += ",\"sigma_range_m\":";
        out += format_double(m.sigma_range);
        out += ",\"sigma_aod_rad\":";
        out += format_double(m.sigma_aod);
        out += "}";
        break;
      }
    }
    out += '\n';
  }
  return out;
}

SensorStreams parse_streams(const std::string& text) {
  SensorStreams s;
  for_each_line(text, [&](std::string_view line) {
    if (line.empty() || line.front() == '#') return;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(std::string("bad stream record: ") + e.what());
    }
    if (!j.contains("t") || !j.contains("type")) {
      throw DataError("stream record missing 't' or 'type'");
    }
    try {
      const std::string type = j["type"].get<std::string>();
      if (type == "imu") {
        ImuSample m;
        m.t = j["t"].get<double>();
        const auto& f = j.at("f");
        const auto& w = j.at("w");
        for (int i = 0; i < 3; ++i) {
          m.f_b[i] = f.at(i).get<double>();
          m.w_b[i] = w.at(i).get<double>();
        }
        s.imu.push_back(m);
      } else if (type == "odo") {
        OdoSample m;
        m.t = j["t"].get<double>();
        m.v_odo = j.at("v").get<double>();
        s.odo.push_back(m);
      } else if (type == "5g") {
        FivegMeasurement m;
        m.t = j["t"].get<double>();
        m.bs_id = j.at("bs").get<int>();
        m.rtt_range = j.at("rtt_range_m").get<double>();
        m.aod = j.at("aod_rad").get<double>();
        m.rx_power_range = j.at("pwr_range_m").get<double>();
        if (j.contains("sigma_range_m")) m.sigma_range = j["sigma_range_m"].get<double>();
        if (j.contains("sigma_aod_rad")) m.sigma_aod = j["sigma_aod_rad"].get<double>();
        s.fiveg.push_back(m);
      } else {
        throw DataError("unknown stream record type: " + type);
      }
    } catch (const json::exception& e) {
      throw DataError(std::string("bad stream record field: ") + e.what());
    }
  });
  return s;
}

std::string serialize_truth(const std::vector<TruthSample>& truth,
                            const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);
  out += "t,lat,lon,h,ve,vn,vu,p,r,a\n";
  for (const TruthSample& ts : truth) {
    const NavState& n = ts.nav;
    out += format_double(ts.t);
    for (double v : {n.pos.lat, n.pos.lon, n.pos.h, n.vel.x(), n.vel.y(), n.vel.z(), n.att.p,
                     n.att.r, n.att.a}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TruthSample> parse_truth(const std::string& text) {
  std::vector<TruthSample> out;
  for_each_line(text, [&](std::string_view line) {
    if (!data_line(line)) return;
    const auto f = split_csv(line);
    if (f.size() != 10) throw DataError("truth row needs 10 columns");
    TruthSample ts;
    ts.t = parse_num(f[0], "truth");
    ts.nav.t = ts.t;
    ts.nav.pos = Geodetic{parse_num(f[1], "truth"), parse_num(f[2], "truth"),
                          parse_num(f[3], "truth")};
    ts.nav.vel = Vector3d(parse_num(f[4], "truth"), parse_num(f[5], "truth"),
                          parse_num(f[6], "truth"));
    ts.nav.att = Attitude{parse_num(f[7], "truth"), parse_num(f[8], "truth"),
                          parse_num(f[9], "truth")};
    ts.nav.q = quat_from_attitude(ts.nav.att);
    out.push_back(ts);
  });
  return out;
}

std::string serialize_estimates(const std::vector<EstimateRow>& rows,
                                const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);
  out += "t,lat,lon,h,ve,vn,vu,p,r,a,bgx,bgy,bgz,bax,bay,baz,"
         "P0,P1,P2,P3,P4,P5,P6,P7,P8,P9,P10,P11,P12,P13,P14,mode\n";
  for (const EstimateRow& r : rows) {
    out += format_double(r.t);
    for (int i = 0; i < 15; ++i) {
      out += ',';
      out += format_double(r.x[i]);
    }
    for (int i = 0; i < 15; ++i) {
      out += ',';
      out += format_double(r.pdiag[i]);
    }
    out += ',';
    out += std::to_string(r.mode);
    out += '\n';
  }
  return out;
}

std::vector<EstimateRow> parse_estimates(const std::string& text) {
  std::vector<EstimateRow> out;
  for_each_line(text, [&](std::string_view line) {
    if (!data_line(line)) return;
    const auto f = split_csv(line);
    if (f.size() != 32) throw DataError("estimate row needs 32 columns");
    EstimateRow r;
    r.t = parse_num(f[0], "estimates");
    for (int i = 0; i < 15; ++i) r.x[i] = parse_num(f[1 + i], "estimates");
    for (int i = 0; i < 15; ++i) r.pdiag[i] = parse_num(f[16 + i], "estimates");
    r.mode = static_cast<int>(parse_num(f[31], "estimates"));
    out.push_back(r);
  });
  return out;
}

std::string serialize_bs(const std::vector<BaseStation>& bss,
                         const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);
  out += "id,e,n,u,boresight\n";
  for (const BaseStation& b : bss) {
    out += std::to_string(b.id);
    for (double v : {b.pos.e, b.pos.n, b.pos.u, b.boresight}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<BaseStation> parse_bs(const std::string& text) {
  std::vector<BaseStation> out;
  for_each_line(text, [&](std::string_view line) {
    if (!data_line(line)) return;
    const auto f = split_csv(line);
    if (f.size() != 5) throw DataError("base-station row needs 5 columns");
    BaseStation b;
    b.id = static_cast<int>(parse_num(f[0], "bs"));
    b.pos = LocalEnu{parse_num(f[1], "bs"), parse_num(f[2], "bs"), parse_num(f[3], "bs")};
    b.boresight = parse_num(f[4], "bs");
    out.push_back(b);
  });
  return out;
}

std::string serialize_labels(const std::vector<FivegRecord>& recs,
                             const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);
  out += "t,bs,los\n";
  for (const FivegRecord& r : recs) {
    out += format_double(r.meas.t);
    out += ',';
    out += std::to_string(r.meas.bs_id);
    out += ',';
    out += r.los_truth ? '1' : '0';
    out += '\n';
  }
  return out;
}

namespace {

json vec3_to_json(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vector3d vec3_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string("field '") + what + "' must be a 3-element array");
  }
  return Vector3d(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["anchor"] = {{"lat_rad", sc.anchor.lat}, {"lon_rad", sc.anchor.lon}, {"h_m", sc.anchor.h}};
  json wps = json::array();
  for (const Waypoint& w : sc.waypoints) wps.push_back(json::array({w.e, w.n, w.dwell}));
  j["waypoints"] = wps;
  j["cruise_speed"] = sc.cruise_speed;
  j["turn_radius"] = sc.turn_radius;
  j["accel_limit"] = sc.accel_limit;
  j["initial_static"] = sc.initial_static;
  j["final_static"] = sc.final_static;
  j["imu_rate"] = sc.imu_rate;
  j["odo_rate"] = sc.odo_rate;
  j["fiveg_rate"] = sc.fiveg_rate;
  j["ref_rate"] = sc.ref_rate;
  j["u_ue"] = sc.u_ue;
  j["bs"] = {{"spacing", sc.bs.spacing},
             {"lateral_offset", sc.bs.lateral_offset},
             {"height", sc.bs.height}};
  j["fiveg"] = {{"sigma_range", sc.fiveg.sigma_range}, {"sigma_aod", sc.fiveg.sigma_aod},
                {"sigma_pwr", sc.fiveg.sigma_pwr},     {"nlos_excess", sc.fiveg.nlos_excess},
                {"max_range", sc.fiveg.max_range},     {"sigma2_h", sc.fiveg.sigma2_h},
                {"p_block", sc.fiveg.p_block},         {"block_window", sc.fiveg.block_window}};
  j["odo"] = {{"resolution", sc.odo.resolution}, {"noise_std", sc.odo.noise_std}};
  j["sensors"] = {{"sigma2_gyro_noise", vec3_to_json(sc.sensors.sigma2_gyro_noise)},
                  {"sigma2_accel_noise", vec3_to_json(sc.sensors.sigma2_accel_noise)},
                  {"sigma2_gyro_bias", vec3_to_json(sc.sensors.sigma2_gyro_bias)},
                  {"sigma2_accel_bias", vec3_to_json(sc.sensors.sigma2_accel_bias)},
                  {"beta_gyro", vec3_to_json(sc.sensors.beta_gyro)},
                  {"beta_accel", vec3_to_json(sc.sensors.beta_accel)},
                  {"sigma2_odo_vel", vec3_to_json(sc.sensors.sigma2_odo_vel)}};
  j["bias_truth"] = {{"dw", vec3_to_json(sc.bias_truth.dw)},
                     {"df", vec3_to_json(sc.bias_truth.df)}};
  json outs = json::array();
  for (const OutageWindow& w : sc.outages) {
    outs.push_back({{"start_s", w.start}, {"duration_s", w.duration}});
  }
  j["outages"] = outs;
  j["seed"] = sc.seed;
  return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);  // allow comments
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  Scenario sc;
  try {
    if (j.contains("name")) sc.name = j["name"].get<std::string>();
    if (j.contains("anchor")) {
      const auto& a = j["anchor"];
      if (a.contains("lat_rad")) sc.anchor.lat = a["lat_rad"].get<double>();
      if (a.contains("lon_rad")) sc.anchor.lon = a["lon_rad"].get<double>();
      if (a.contains("h_m")) sc.anchor.h = a["h_m"].get<double>();
    }
    if (!j.contains("waypoints")) {
      throw ConfigError("scenario is missing required field 'waypoints'");
    }
    const auto& wps = j["waypoints"];
    if (!wps.is_array() || wps.size() < 2) {
      throw ConfigError("field 'waypoints' must be an array of at least two [e,n,dwell] entries");
    }
    for (const auto& w : wps) {
      if (!w.is_array() || w.size() < 2) {
        throw ConfigError("field 'waypoints' entries must be [e,n] or [e,n,dwell]");
      }
      Waypoint wp;
      wp.e = w.at(0).get<double>();
      wp.n = w.at(1).get<double>();
      if (w.size() > 2) wp.dwell = w.at(2).get<double>();
      sc.waypoints.push_back(wp);
    }
    auto opt = [&](const char* key, double& slot) {
      if (j.contains(key)) slot = j[key].get<double>();
    };
    opt("cruise_speed", sc.cruise_speed);
    opt("turn_radius", sc.turn_radius);
    opt("accel_limit", sc.accel_limit);
    opt("initial_static", sc.initial_static);
    opt("final_static", sc.final_static);
    opt("imu_rate", sc.imu_rate);
    opt("odo_rate", sc.odo_rate);
    opt("fiveg_rate", sc.fiveg_rate);
    opt("ref_rate", sc.ref_rate);
    opt("u_ue", sc.u_ue);
    if (j.contains("bs")) {
      const auto& b = j["bs"];
      if (b.contains("spacing")) sc.bs.spacing = b["spacing"].get<double>();
      if (b.contains("lateral_offset")) sc.bs.lateral_offset = b["lateral_offset"].get<double>();
      if (b.contains("height")) sc.bs.height = b["height"].get<double>();
    }
    if (j.contains("fiveg")) {
      const auto& f = j["fiveg"];
      auto fopt = [&](const char* key, double& slot) {
        if (f.contains(key)) slot = f[key].get<double>();
      };
      fopt("sigma_range", sc.fiveg.sigma_range);
      fopt("sigma_aod", sc.fiveg.sigma_aod);
      fopt("sigma_pwr", sc.fiveg.sigma_pwr);
      fopt("nlos_excess", sc.fiveg.nlos_excess);
      fopt("max_range", sc.fiveg.max_range);
      fopt("sigma2_h", sc.fiveg.sigma2_h);
      fopt("p_block", sc.fiveg.p_block);
      fopt("block_window", sc.fiveg.block_window);
    }
    if (j.contains("odo")) {
      const auto& o = j["odo"];
      if (o.contains("resolution")) sc.odo.resolution = o["resolution"].get<double>();
      if (o.contains("noise_std")) sc.odo.noise_std = o["noise_std"].get<double>();
    }
    if (j.contains("sensors")) {
      const auto& s = j["sensors"];
      auto sopt = [&](const char* key, Vector3d& slot) {
        if (s.contains(key)) slot = vec3_from_json(s[key], key);
      };
      sopt("sigma2_gyro_noise", sc.sensors.sigma2_gyro_noise);
      sopt("sigma2_accel_noise", sc.sensors.sigma2_accel_noise);
      sopt("sigma2_gyro_bias", sc.sensors.sigma2_gyro_bias);
      sopt("sigma2_accel_bias", sc.sensors.sigma2_accel_bias);
      sopt("beta_gyro", sc.sensors.beta_gyro);
      sopt("beta_accel", sc.sensors.beta_accel);
      sopt("sigma2_odo_vel", sc.sensors.sigma2_odo_vel);
    }
    if (j.contains("bias_truth")) {
      const auto& b = j["bias_truth"];
      if (b.contains("dw")) sc.bias_truth.dw = vec3_from_json(b["dw"], "dw");
      if (b.contains("df")) sc.bias_truth.df = vec3_from_json(b["df"], "df");
    }
    if (j.contains("outages")) {
      for (const auto& w : j["outages"]) {
        OutageWindow ow;
        if (!w.contains("start_s") || !w.contains("duration_s")) {
          throw ConfigError("field 'outages' entries need 'start_s' and 'duration_s'");
        }
        ow.start = w["start_s"].get<double>();
        ow.duration = w["duration_s"].get<double>();
        sc.outages.push_back(ow);
      }
    }
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field has the wrong type: ") + e.what());
  }
  return sc;
}

std::vector<NavState> nav_from_rows(const std::vector<EstimateRow>& rows) {
  std::vector<NavState> out;
  out.reserve(rows.size());
  for (const EstimateRow& r : rows) {
    NavState n;
    n.t = r.t;
    n.pos = Geodetic{r.x[0], r.x[1], r.x[2]};
    n.vel = Vector3d(r.x[3], r.x[4], r.x[5]);
    n.att = Attitude{r.x[6], r.x[7], r.x[8]};
    n.q = quat_from_attitude(n.att);
    out.push_back(n);
  }
  return out;
}

std::string serialize_cdf(const std::vector<std::pair<double, double>>& cdf,
                          const std::vector<std::string>& header) {
  std::string out;
  append_header(out, header);
  out += "error_m,fraction\n";
  for (const auto& [v, f] : cdf) {
    out += format_double(v);
    out += ',';
    out += format_double(f);
    out += '\n';
  }
  return out;
}

}  // namespace navfuse
