#include "navfuse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace navfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_pm_pi(double x) {
  double w = std::fmod(x + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

// Azimuth (clockwise from north) of an ENU direction vector.
double azimuth_of(const Eigen::Vector2d& d) { return wrap_azimuth(std::atan2(d.x(), d.y())); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(a + 1) ^ splitmix64(splitmix64(b + 2)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + stream * 0x9E3779B97F4A7C15ull);
}

}  // namespace

Trajectory::Trajectory(const std::vector<Waypoint>& wps, double cruise, double turn_radius,
                       double accel_limit, double initial_static, double final_static,
                       double max_lateral_g) {
  if (wps.size() < 2) throw std::invalid_argument("trajectory needs at least two waypoints");
  if (cruise <= 0.0 || accel_limit <= 0.0) {
    throw std::invalid_argument("cruise speed and acceleration limit must be positive");
  }
  if (turn_radius > 0.0 &&
      cruise * cruise / turn_radius > max_lateral_g * 9.80665) {
    throw std::invalid_argument("turn radius infeasible for cruise speed (lateral accel limit)");
  }

  // Stops: (arc length, dwell). Start/end act as stops with the static dwells.
  std::vector<std::pair<double, double>> stops;
  stops.emplace_back(0.0, initial_static);

  // Geometry: legs joined by arc fillets at turning waypoints.
  Eigen::Vector2d p = Eigen::Vector2d(wps.front().e, wps.front().n);
  double s = 0.0;
  auto push_line = [&](const Eigen::Vector2d& to) {
    const double len = (to - p).norm();
    if (len < 1e-12) return;
    Segment seg;
    seg.arc = false;
    seg.s0 = s;
    seg.len = len;
    seg.p0 = p;
    seg.dir = (to - p) / len;
    segments_.push_back(seg);
    s += len;
    p = to;
  };

  for (std::size_t i = 1; i + 1 < wps.size(); ++i) {
    const Eigen::Vector2d w(wps[i].e, wps[i].n);
    const Eigen::Vector2d prev(wps[i - 1].e, wps[i - 1].n);
    const Eigen::Vector2d next(wps[i + 1].e, wps[i + 1].n);
    const Eigen::Vector2d d1 = (w - prev).normalized();
    const Eigen::Vector2d d2 = (next - w).normalized();
    const double turn = wrap_pm_pi(azimuth_of(d2) - azimuth_of(d1));
    if (std::abs(turn) < 1e-9) {  // through point; valid stop location
      push_line(w);
      if (wps[i].dwell > 0.0) stops.emplace_back(s, wps[i].dwell);
      continue;
    }
    if (wps[i].dwell > 0.0) {
      throw std::invalid_argument("stop waypoints must lie on straight path sections");
    }
    if (kPi - std::abs(turn) < 1e-6) {
      throw std::invalid_argument("U-turn waypoints are not supported");
    }
    const double tan_dist = turn_radius * std::tan(0.5 * std::abs(turn));
    if (tan_dist > (w - prev).norm() - 1e-9 || tan_dist > (next - w).norm() - 1e-9) {
      throw std::invalid_argument("turn radius too large for adjacent leg lengths");
    }
    const Eigen::Vector2d entry = w - d1 * tan_dist;
    push_line(entry);
    Segment arc;
    arc.arc = true;
    arc.s0 = s;
    arc.len = turn_radius * std::abs(turn);
    arc.radius = turn_radius;
    arc.sign = turn > 0.0 ? 1.0 : -1.0;
    const double zeta1 = azimuth_of(d1);
    // Unit normal toward the turn center, then the radius-vector azimuth.
    const Eigen::Vector2d normal =
        arc.sign > 0.0 ? Eigen::Vector2d(d1.y(), -d1.x()) : Eigen::Vector2d(-d1.y(), d1.x());
    arc.center = entry + turn_radius * normal;
    arc.phi0 = wrap_azimuth(zeta1 - arc.sign * 0.5 * kPi);
    segments_.push_back(arc);
    corner_mid_s_.push_back(s + 0.5 * arc.len);
    s += arc.len;
    p = w + d2 * tan_dist;
  }
  push_line(Eigen::Vector2d(wps.back().e, wps.back().n));
  total_length_ = s;
  if (total_length_ < 1e-9) throw std::invalid_argument("path has zero length");
  stops.emplace_back(total_length_, final_static);

  // Motion: trapezoidal speed between consecutive stops, then the dwell.
  double t = 0.0;
  auto push_phase = [&](double dt, double s0, double v0, double a) {
    if (dt <= 1e-12) return;
    Phase ph;
    ph.t0 = t;
    ph.dt = dt;
    ph.s0 = s0;
    ph.v0 = v0;
    ph.a = a;
    phases_.push_back(ph);
    t += dt;
  };
  for (std::size_t i = 0; i < stops.size(); ++i) {
    push_phase(stops[i].second, stops[i].first, 0.0, 0.0);  // dwell
    if (i + 1 == stops.size()) break;
    const double s0 = stops[i].first;
    const double d = stops[i + 1].first - s0;
    if (d <= 1e-9) continue;
    const double v_peak = std::min(cruise, std::sqrt(accel_limit * d));
    const double ramp = v_peak / accel_limit;
    const double ramp_len = 0.5 * v_peak * ramp;
    push_phase(ramp, s0, 0.0, accel_limit);
    const double cruise_len = d - 2.0 * ramp_len;
    if (cruise_len > 1e-9) push_phase(cruise_len / v_peak, s0 + ramp_len, v_peak, 0.0);
    push_phase(ramp, s0 + d - ramp_len, v_peak, -accel_limit);
  }
  total_time_ = t;
}

void Trajectory::geometry_at(double s, Eigen::Vector2d* pos, double* azimuth,
                             double* kappa) const {
  s = std::clamp(s, 0.0, total_length_);
  std::size_t lo = 0, hi = segments_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (segments_[mid].s0 <= s) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const Segment& seg = segments_[lo];
  const double ds = std::clamp(s - seg.s0, 0.0, seg.len);
  if (!seg.arc) {
    *pos = seg.p0 + seg.dir * ds;
    *azimuth = azimuth_of(seg.dir);
    *kappa = 0.0;
  } else {
    const double chi = seg.phi0 + seg.sign * ds / seg.radius;
    *pos = seg.center + seg.radius * Eigen::Vector2d(std::sin(chi), std::cos(chi));
    *azimuth = wrap_azimuth(chi + seg.sign * 0.5 * kPi);
    *kappa = seg.sign / seg.radius;
  }
}

Trajectory::Kinematics Trajectory::eval(double t) const {
  t = std::clamp(t, 0.0, total_time_);
  std::size_t lo = 0, hi = phases_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (phases_[mid].t0 <= t) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const Phase& ph = phases_[lo];
  const double tau = std::clamp(t - ph.t0, 0.0, ph.dt);
  const double s = ph.s0 + ph.v0 * tau + 0.5 * ph.a * tau * tau;
  const double v = std::max(0.0, ph.v0 + ph.a * tau);

  Kinematics k;
  double zeta = 0.0, kappa = 0.0;
  geometry_at(s, &k.pos, &zeta, &kappa);
  const Eigen::Vector2d tangent(std::sin(zeta), std::cos(zeta));
  const Eigen::Vector2d right_normal(std::cos(zeta), -std::sin(zeta));
  k.vel = v * tangent;
  k.acc = ph.a * tangent + v * v * kappa * right_normal;
  k.azimuth = zeta;
  k.speed = v;
  k.azimuth_rate = v * kappa;
  return k;
}

double Trajectory::time_at_arclength(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  for (const Phase& ph : phases_) {
    const double s_end = ph.s0 + ph.v0 * ph.dt + 0.5 * ph.a * ph.dt * ph.dt;
    if (s > s_end + 1e-9) continue;
    if (ph.v0 <= 0.0 && ph.a <= 0.0) {
      if (s <= ph.s0 + 1e-9) return ph.t0;  // dwell at this arc length
      continue;
    }
    const double ds = std::max(0.0, s - ph.s0);
    const double disc = std::max(0.0, ph.v0 * ph.v0 + 2.0 * ph.a * ds);
    const double denom = ph.v0 + std::sqrt(disc);
    const double tau = denom > 1e-12 ? 2.0 * ds / denom : 0.0;
    return ph.t0 + std::clamp(tau, 0.0, ph.dt);
  }
  return total_time_;
}

std::vector<TruthSample> generate_trajectory(const Trajectory& traj, const Geodetic& anchor,
                                             double u_ue, double rate, const EarthModel& em) {
  if (rate <= 0.0) throw std::invalid_argument("sample rate must be positive");
  const std::size_t n = static_cast<std::size_t>(std::floor(traj.duration() * rate)) + 1;
  std::vector<TruthSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const auto k = traj.eval(t);
    TruthSample ts;
    ts.t = t;
    LocalEnu enu;
    enu.e = k.pos.x();
    enu.n = k.pos.y();
    enu.u = u_ue;
    ts.nav.t = t;
    ts.nav.pos = enu_to_geodetic(em, anchor, enu);
    ts.nav.vel = Vector3d(k.vel.x(), k.vel.y(), 0.0);
    ts.nav.att = Attitude{0.0, 0.0, k.azimuth};
    ts.nav.q = quat_from_attitude(ts.nav.att);
    out.push_back(ts);
  }
  return out;
}

std::vector<TruthSample> generate_trajectory(const std::vector<Waypoint>& wps, double cruise,
                                             double rate, const Geodetic& anchor,
                                             const EarthModel& em, double turn_radius,
                                             double accel_limit) {
  const Trajectory traj(wps, cruise, turn_radius, accel_limit, 0.0, 0.0);
  return generate_trajectory(traj, anchor, 0.0, rate, em);
}

std::vector<ImuSample> inverse_mechanize(const std::vector<TruthSample>& truth,
                                         const EarthModel& em) {
  if (truth.size() < 2) throw std::invalid_argument("need at least two truth samples");
  std::vector<ImuSample> out;
  out.reserve(truth.size());

  auto steady_sample = [&](const TruthSample& ts) {
    // Zero body rotation / zero linear acceleration consistency values.
    ImuSample s;
    s.t = ts.t;
    const Vector3d w_ie = earth_rate_l(em, ts.nav.pos.lat);
    const Vector3d w_el = transport_rate(em, ts.nav.vel, ts.nav.pos);
    const Vector3d w_in = w_ie + w_el;
    const Vector3d w_cor = 2.0 * w_ie + w_el;
    const double g = em.gravity(ts.nav.pos.lat, ts.nav.pos.h);
    s.w_b = ts.nav.q.conjugate() * w_in;
    s.f_b = ts.nav.q.conjugate() * (w_cor.cross(ts.nav.vel) + Vector3d(0.0, 0.0, g));
    return s;
  };
  out.push_back(steady_sample(truth.front()));

  for (std::size_t k = 0; k + 1 < truth.size(); ++k) {
    const NavState& a = truth[k].nav;
    const NavState& b = truth[k + 1].nav;
    const double dt = truth[k + 1].t - truth[k].t;
    if (dt <= 0.0) throw std::invalid_argument("truth timestamps must be strictly increasing");

    ImuSample s;
    s.t = truth[k + 1].t;

    // Invert the normalized first-order attitude step exactly: the step rotates
    // by 2*atan(|w|*dt/2) about the rate axis.
    Quaternion dq = a.q.conjugate() * b.q;
    if (dq.w() < 0.0) dq.coeffs() *= -1.0;
    const Eigen::AngleAxisd aa(dq);
    Vector3d w_lb_b = Vector3d::Zero();
    if (aa.angle() > 1e-14) {
      w_lb_b = aa.axis() * (2.0 / dt) * std::tan(0.5 * aa.angle());
    }
    const Vector3d w_ie = earth_rate_l(em, a.pos.lat);
    const Vector3d w_el = transport_rate(em, a.vel, a.pos);
    s.w_b = w_lb_b + a.q.conjugate() * (w_ie + w_el);

    // Invert the velocity step: the specific force resolved with the updated
    // attitude balances dv/dt, Coriolis, and gravity.
    const Vector3d w_cor = 2.0 * w_ie + w_el;
    const double g = em.gravity(a.pos.lat, a.pos.h);
    const Vector3d f_l = (b.vel - a.vel) / dt + w_cor.cross(a.vel) + Vector3d(0.0, 0.0, g);
    s.f_b = b.q.conjugate() * f_l;
    out.push_back(s);
  }
  return out;
}

std::vector<OdoSample> perfect_odometer(const std::vector<TruthSample>& truth, double odo_rate) {
  if (truth.empty()) return {};
  if (odo_rate <= 0.0) throw std::invalid_argument("odometer rate must be positive");
  std::vector<OdoSample> out;
  const double t_end = truth.back().t;
  std::size_t j = 0;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) / odo_rate;
    if (t > t_end + 1e-9) break;
    while (j + 1 < truth.size() && truth[j + 1].t <= t + 1e-12) ++j;
    double speed = 0.0;
    if (j + 1 < truth.size() && truth[j + 1].t > truth[j].t) {
      const double u = std::clamp((t - truth[j].t) / (truth[j + 1].t - truth[j].t), 0.0, 1.0);
      const Vector3d v = (1.0 - u) * truth[j].nav.vel + u * truth[j + 1].nav.vel;
      speed = std::hypot(v.x(), v.y());
    } else {
      speed = std::hypot(truth[j].nav.vel.x(), truth[j].nav.vel.y());
    }
    OdoSample o;
    o.t = t;
    o.v_odo = speed < 1e-12 ? 0.0 : speed;
    out.push_back(o);
  }
  return out;
}

std::vector<ImuSample> corrupt_imu(const std::vector<ImuSample>& perfect, const SensorSpec& spec,
                                   const BiasState& bias_truth, std::uint64_t seed) {
  std::vector<ImuSample> out;
  out.reserve(perfect.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  BiasState b = bias_truth;
  for (std::size_t i = 0; i < perfect.size(); ++i) {
    ImuSample s = perfect[i];
    for (int k = 0; k < 3; ++k) {
      s.w_b[k] += b.dw[k] + std::sqrt(spec.sigma2_gyro_noise[k]) * n01(rng);
    }
    for (int k = 0; k < 3; ++k) {
      s.f_b[k] += b.df[k] + std::sqrt(spec.sigma2_accel_noise[k]) * n01(rng);
    }
    out.push_back(s);
    if (i + 1 < perfect.size()) {
      const double dt = perfect[i + 1].t - perfect[i].t;
      Eigen::Matrix<double, 6, 1> noise;
      for (int k = 0; k < 6; ++k) noise[k] = n01(rng);
      b = gm_propagate(b, spec, dt, noise);
    }
  }
  return out;
}

std::vector<OdoSample> corrupt_odo(const std::vector<OdoSample>& perfect, const OdoConfig& cfg,
                                   std::uint64_t seed) {
  std::vector<OdoSample> out;
  out.reserve(perfect.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (const OdoSample& p : perfect) {
    double v = p.v_odo + cfg.noise_std * n01(rng);
    v = std::max(0.0, v);
    if (cfg.resolution > 0.0) {
      v = v < cfg.resolution ? 0.0 : std::round(v / cfg.resolution) * cfg.resolution;
    }
    OdoSample o;
    o.t = p.t;
    o.v_odo = v;
    out.push_back(o);
  }
  return out;
}

std::vector<BaseStation> deploy_bs(const std::vector<TruthSample>& truth, double spacing,
                                   double lateral_offset, double height, const EarthModel& em) {
  if (truth.empty()) throw std::invalid_argument("empty truth path");
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  const Geodetic anchor = truth.front().nav.pos;

  // Collapse the sampled path to its moving polyline (unique positions).
  struct Node {
    Eigen::Vector2d p;
    double az;
    double s;
  };
  std::vector<Node> nodes;
  double s = 0.0;
  for (const TruthSample& ts : truth) {
    const LocalEnu e = geodetic_to_enu(em, anchor, ts.nav.pos);
    const Eigen::Vector2d p(e.e, e.n);
    if (!nodes.empty()) {
      const double d = (p - nodes.back().p).norm();
      if (d < 1e-9) continue;
      s += d;
    }
    nodes.push_back({p, ts.nav.att.a, s});
  }
  if (nodes.empty()) nodes.push_back({Eigen::Vector2d::Zero(), truth.front().nav.att.a, 0.0});
  const double total = nodes.back().s;
  const bool closed = nodes.size() > 1 && (nodes.back().p - nodes.front().p).norm() < 1.0;

  std::vector<double> sites;
  for (double target = 0.0; target < total - 1e-6; target += spacing) sites.push_back(target);
  if (!closed && (sites.empty() || total - sites.back() > 1e-6)) sites.push_back(total);
  if (sites.empty()) sites.push_back(0.0);

  std::vector<BaseStation> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double target = sites[i];
    while (j + 1 < nodes.size() && nodes[j + 1].s < target) ++j;
    Eigen::Vector2d p = nodes[j].p;
    double az = nodes[j].az;
    if (j + 1 < nodes.size() && nodes[j + 1].s > nodes[j].s) {
      const double u = std::clamp((target - nodes[j].s) / (nodes[j + 1].s - nodes[j].s), 0.0, 1.0);
      p = (1.0 - u) * nodes[j].p + u * nodes[j + 1].p;
      az = nodes[j].az + u * angle_diff(nodes[j + 1].az, nodes[j].az);
    }
    const double side = (i % 2 == 0) ? 1.0 : -1.0;  // alternate right/left of travel
    const Eigen::Vector2d right_normal(std::cos(az), -std::sin(az));
    const Eigen::Vector2d site = p + side * lateral_offset * right_normal;
    BaseStation bs;
    bs.id = static_cast<int>(i);
    bs.pos = LocalEnu{site.x(), site.y(), height};
    bs.boresight = wrap_azimuth(az + side * 0.5 * kPi + kPi);  // faces the road
    out.push_back(bs);
  }
  return out;
}

std::vector<FivegRecord> synthesize_5g(const std::vector<TruthSample>& truth_5g,
                                       const std::vector<BaseStation>& bss,
                                       const std::vector<OutageWindow>& schedule,
                                       const FivegSpec& spec, std::uint64_t seed,
                                       const EarthModel& em) {
  if (truth_5g.empty()) return {};
  const Geodetic anchor = truth_5g.front().nav.pos;
  std::mt19937_64 rng(derive_seed(seed, 11));
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::uint64_t shadow_seed = derive_seed(seed, 12);

  auto in_outage = [&](double t) {
    for (const OutageWindow& w : schedule) {
      if (t >= w.start - 1e-9 && t < w.start + w.duration - 1e-9) return true;
    }
    return false;
  };

  std::vector<FivegRecord> out;
  for (const TruthSample& ts : truth_5g) {
    const LocalEnu ue = geodetic_to_enu(em, anchor, ts.nav.pos);
    // Visible set and the nearest base station.
    std::vector<std::size_t> visible;
    double best_r = 0.0;
    std::size_t best = bss.size();
    for (std::size_t i = 0; i < bss.size(); ++i) {
      const double de = ue.e - bss[i].pos.e;
      const double dn = ue.n - bss[i].pos.n;
      const double du = ue.u - bss[i].pos.u;
      const double horiz = std::hypot(de, dn);
      const double r = std::sqrt(de * de + dn * dn + du * du);
      if (r > spec.max_range || horiz < 0.5) continue;
      visible.push_back(i);
      if (best == bss.size() || r < best_r) {
        best = i;
        best_r = r;
      }
    }
    const bool outage = in_outage(ts.t);
    for (std::size_t i : visible) {
      const RangeAngles ra = range_and_angles(ue, bss[i].pos);
      const double r = ra.r;
      const double aod_true = azimuth_from_ccw(ra.theta_ccw);
      bool nlos = outage;
      if (!nlos && i != best && spec.p_block > 0.0) {
        const std::uint64_t win =
            static_cast<std::uint64_t>(std::floor(ts.t / spec.block_window));
        nlos = hash_uniform(shadow_seed, static_cast<std::uint64_t>(bss[i].id), win) < spec.p_block;
      }
      FivegRecord rec;
      rec.meas.t = ts.t;
      rec.meas.bs_id = bss[i].id;
      rec.meas.rtt_range = r + spec.sigma_range * n01(rng);
      rec.meas.aod = wrap_azimuth(aod_true + spec.sigma_aod * n01(rng));
      rec.meas.rx_power_range = r + spec.sigma_pwr * n01(rng) + (nlos ? spec.nlos_excess : 0.0);
      rec.meas.sigma_range = spec.sigma_range;
      rec.meas.sigma_aod = spec.sigma_aod;
      rec.los_truth = !nlos;
      out.push_back(rec);
    }
  }
  return out;
}

Trajectory scenario_trajectory(const Scenario& sc) {
  return Trajectory(sc.waypoints, sc.cruise_speed, sc.turn_radius, sc.accel_limit,
                    sc.initial_static, sc.final_static);
}

Scenario reference_scenario() {
  Scenario sc;
  sc.name = "reference";
  const double dwell = 143.0;
  auto wp = [](double e, double n, double d = 0.0) { return Waypoint{e, n, d}; };
  // Clockwise loop, started mid-leg so that all four corners are interior.
  sc.waypoints = {
      wp(1300, 0),
      wp(1000, 0, dwell), wp(700, 0, dwell), wp(400, 0, dwell),
      wp(0, 0),  // corner 1: west -> north
      wp(0, 300, dwell), wp(0, 600, dwell), wp(0, 900, dwell), wp(0, 1200, dwell),
      wp(0, 1500, dwell),
      wp(0, 1900),  // corner 2: north -> east
      wp(300, 1900, dwell), wp(600, 1900, dwell), wp(900, 1900, dwell), wp(1200, 1900, dwell),
      wp(1500, 1900, dwell), wp(1800, 1900, dwell), wp(2100, 1900, dwell), wp(2400, 1900, dwell),
      wp(2600, 1900),  // corner 3: east -> south
      wp(2600, 1500, dwell), wp(2600, 1200, dwell), wp(2600, 900, dwell), wp(2600, 600, dwell),
      wp(2600, 300, dwell),
      wp(2600, 0),  // corner 4: south -> west
      wp(2300, 0, dwell), wp(2000, 0, dwell), wp(1700, 0, dwell),
      wp(1300, 0),
  };
  sc.cruise_speed = 8.2;
  sc.turn_radius = 20.0;
  sc.accel_limit = 2.0;
  sc.initial_static = 60.0;
  sc.final_static = 5.0;
  sc.imu_rate = 20.0;
  sc.odo_rate = 1.0;
  sc.fiveg_rate = 5.0;
  sc.ref_rate = 5.0;
  sc.bs = BsConfig{250.0, 15.0, 10.0};
  sc.fiveg.sigma_range = 0.3;
  sc.fiveg.sigma_aod = 0.05 * 0.017453292519943295;
  sc.fiveg.sigma_pwr = 3.0;
  sc.fiveg.nlos_excess = 50.0;
  sc.fiveg.max_range = 350.0;
  sc.fiveg.sigma2_h = 0.04;
  sc.fiveg.p_block = 0.45;
  sc.fiveg.block_window = 12.0;
  sc.odo = OdoConfig{0.1, 0.03};
  sc.bias_truth.dw = Vector3d(3e-4, -2e-4, 2.5e-4);
  sc.bias_truth.df = Vector3d(0.015, -0.01, 0.02);
  sc.seed = 20260822;

  // Service outages start just before each corner turn, on the 5G epoch grid.
  const Trajectory traj = scenario_trajectory(sc);
  const std::vector<double> durations = {13.0, 8.0, 20.0, 100.0};
  const auto corners = traj.corner_arclengths();
  if (corners.size() != durations.size()) {
    throw std::logic_error("reference scenario expects four corner turns");
  }
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const double t_mid = traj.time_at_arclength(corners[i]);
    const double start = std::max(0.0, std::floor((t_mid - 3.0) / 0.2) * 0.2);
    sc.outages.push_back(OutageWindow{start, durations[i]});
  }
  return sc;
}

SimResult simulate(const Scenario& sc, const EarthModel& em) {
  if (sc.waypoints.size() < 2) throw std::invalid_argument("scenario needs waypoints");
  for (std::size_t i = 0; i < sc.outages.size(); ++i) {
    for (std::size_t j = i + 1; j < sc.outages.size(); ++j) {
      const auto& a = sc.outages[i];
      const auto& b = sc.outages[j];
      if (a.start < b.start + b.duration && b.start < a.start + a.duration) {
        throw std::invalid_argument("outage windows overlap");
      }
    }
  }
  const Trajectory traj = scenario_trajectory(sc);
  SimResult r;
  r.truth_imu = generate_trajectory(traj, sc.anchor, sc.u_ue, sc.imu_rate, em);
  r.truth_ref = generate_trajectory(traj, sc.anchor, sc.u_ue, sc.ref_rate, em);
  const auto truth_5g = generate_trajectory(traj, sc.anchor, sc.u_ue, sc.fiveg_rate, em);

  r.imu_perfect = inverse_mechanize(r.truth_imu, em);
  for (std::size_t i = 0; i < r.truth_imu.size(); ++i) {
    r.truth_imu[i].f_b = r.imu_perfect[i].f_b;
    r.truth_imu[i].w_b = r.imu_perfect[i].w_b;
  }
  r.imu = corrupt_imu(r.imu_perfect, sc.sensors, sc.bias_truth, derive_seed(sc.seed, 1));
  r.odo_perfect = perfect_odometer(r.truth_imu, sc.odo_rate);
  r.odo = corrupt_odo(r.odo_perfect, sc.odo, derive_seed(sc.seed, 2));
  r.bss = deploy_bs(r.truth_imu, sc.bs.spacing, sc.bs.lateral_offset, sc.bs.height, em);
  r.fiveg = synthesize_5g(truth_5g, r.bss, sc.outages, sc.fiveg, derive_seed(sc.seed, 3), em);
  return r;
}

}  // namespace navfuse
