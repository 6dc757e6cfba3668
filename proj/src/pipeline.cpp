#include "navfuse/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace navfuse {

namespace {

constexpr double kTimeTol = 1e-9;

BiasState static_window_biases(const std::vector<ImuSample>& imu, const NavState& init,
                               const RunOptions& opt, const SensorSpec& spec,
                               const EarthModel& em) {
  std::vector<ImuSample> window;
  const double t_end = (imu.empty() ? 0.0 : imu.front().t) + opt.static_init;
  for (const ImuSample& s : imu) {
    if (s.t > t_end + kTimeTol) break;
    window.push_back(s);
  }
  BiasState b;
  b.dw = estimate_gyro_bias(window, 10.0, &spec);
  const double g = em.gravity(init.pos.lat, init.pos.h);
  b.df = estimate_accel_bias(window, init.att, g, 10.0, &spec);
  return b;
}

EstimateRow row_from_filter(const FilterState& fs, int mode) {
  EstimateRow r;
  r.t = fs.t;
  r.x = fs.x;
  r.pdiag = fs.P.diagonal();
  r.mode = mode;
  return r;
}

}  // namespace

PipelineKind pipeline_from_name(const std::string& name) {
  if (name == "ins-only") return PipelineKind::INS_ONLY;
  if (name == "ins-odo") return PipelineKind::INS_ODO;
  if (name == "5g-only-cv") return PipelineKind::FIVEG_CV;
  if (name == "5g-obms") return PipelineKind::FIVEG_OBMS;
  throw ConfigError("unknown pipeline '" + name +
                    "' (valid: ins-only, ins-odo, 5g-only-cv, 5g-obms)");
}

std::string pipeline_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::INS_ONLY:
      return "ins-only";
    case PipelineKind::INS_ODO:
      return "ins-odo";
    case PipelineKind::FIVEG_CV:
      return "5g-only-cv";
    case PipelineKind::FIVEG_OBMS:
      return "5g-obms";
  }
  return "unknown";
}

std::vector<FivegFix> fixes_from_stream(const std::vector<FivegMeasurement>& fiveg,
                                        const std::vector<BaseStation>& bss,
                                        const RunOptions& opt, const Geodetic& anchor,
                                        const EarthModel& em) {
  if (fiveg.empty()) return {};
  double gamma = opt.gamma;
  if (gamma <= 0.0) {
    gamma = default_nlos_gamma(fiveg.front().sigma_range, 3.0);
  }
  return process_stream(fiveg, bss, gamma, opt.u_ue, opt.sigma2_h, em, anchor);
}

NavState resolve_init(const NavState& reference_init, const std::vector<FivegFix>& fixes) {
  NavState init = reference_init;
  for (const FivegFix& f : fixes) {
    if (f.mode == FixMode::LOS) {
      init.pos = f.pos;
      break;
    }
  }
  init.vel.setZero();
  init.q = quat_from_attitude(init.att);
  return init;
}

RunOutput run_ins_only(const std::vector<ImuSample>& imu, const std::vector<OdoSample>& odo,
                       const NavState& init, const SensorSpec& spec, const RunOptions& opt,
                       const EarthModel& em) {
  if (imu.empty()) throw DataError("empty IMU stream");
  BiasState bias;
  if (opt.bias_removal) bias = static_window_biases(imu, init, opt, spec, em);

  MechConfig cfg;
  cfg.v_eps = opt.v_eps;
  cfg.stop_mechanism = opt.stop_mechanism && opt.use_odometer;
  cfg.initial_bias_removal = opt.bias_removal;
  cfg.rezero_gyro_at_stops = true;
  cfg.earth = em;

  const std::vector<OdoSample> empty_odo;
  const std::vector<OdoSample>& odo_used = opt.use_odometer ? odo : empty_odo;
  const std::vector<NavState> nav = mechanize(imu, odo_used, init, bias, cfg);

  RunOutput out;
  out.nav = nav;
  out.rows.reserve(nav.size());
  for (const NavState& s : nav) {
    EstimateRow r;
    r.t = s.t;
    FilterState fs;
    fs.t = s.t;
    set_filter_nav(fs, s);
    set_filter_bias(fs, bias);
    r.x = fs.x;
    r.mode = 0;
    out.rows.push_back(r);
  }
  return out;
}

RunOutput run_lc_fusion(const std::vector<ImuSample>& imu, const std::vector<OdoSample>& odo,
                        const std::vector<FivegFix>& fixes, const NavState& init,
                        const SensorSpec& spec, const RunOptions& opt, const EarthModel& em) {
  if (imu.empty()) throw DataError("empty IMU stream");
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (imu[i].t <= imu[i - 1].t) throw DataError("IMU timestamps must be increasing");
  }

  FilterState fs;
  fs.t = imu.front().t;
  NavState nav0 = init;
  nav0.t = fs.t;
  set_filter_nav(fs, nav0);

  BiasState bias0;
  if (opt.bias_removal) bias0 = static_window_biases(imu, init, opt, spec, em);
  set_filter_bias(fs, bias0);

  // Initial uncertainty: meters to radians for lat/lon through the local radii.
  const Radii rd = radii(em, init.pos.lat);
  const double sp0 = 1.0;  // m horizontal
  Vector15 p0;
  p0 << std::pow(sp0 / (rd.M + init.pos.h), 2),
      std::pow(sp0 / ((rd.N + init.pos.h) * std::cos(init.pos.lat)), 2), 1.0,
      0.01, 0.01, 0.01,
      std::pow(0.3 * 0.017453292519943295, 2), std::pow(0.3 * 0.017453292519943295, 2),
      std::pow(1.0 * 0.017453292519943295, 2),
      spec.sigma2_gyro_bias.x(), spec.sigma2_gyro_bias.y(), spec.sigma2_gyro_bias.z(),
      spec.sigma2_accel_bias.x(), spec.sigma2_accel_bias.y(), spec.sigma2_accel_bias.z();
  fs.P = p0.asDiagonal();

  RunOutput out;
  out.rows.reserve(imu.size());
  out.nav.reserve(imu.size());

  std::size_t io = 0;  // odometer cursor
  std::size_t jf = 0;  // fix cursor
  OdoSample last_odo;  // starts at rest: v = 0
  int mode = 0;
  const bool stops_on = opt.stop_mechanism && opt.use_odometer;
  bool frozen = false;
  // Live mechanized velocity for the stationarity test: keeps integrating
  // while the filter is frozen and is re-anchored by every odometer zero, so
  // a departure is caught within a sample or two.
  Vector3d shadow_vel = init.vel;

  // Consume anything at or before the first IMU epoch.
  while (io < odo.size() && odo[io].t <= imu.front().t + kTimeTol) last_odo = odo[io++];
  while (jf < fixes.size() && fixes[jf].t <= imu.front().t + kTimeTol) {
    mode = fixes[jf].mode == FixMode::LOS ? 1 : 2;
    ++jf;
  }
  out.rows.push_back(row_from_filter(fs, mode));
  out.nav.push_back(nav_from_filter(fs));

  for (std::size_t k = 1; k < imu.size(); ++k) {
    const double t_prev = imu[k - 1].t;
    const double t_now = imu[k].t;
    const double dt = t_now - t_prev;

    // Odometer samples inside this step feed the stop test and the updates.
    std::vector<OdoSample> odo_step;
    while (io < odo.size() && odo[io].t <= t_now + kTimeTol) {
      odo_step.push_back(odo[io]);
      last_odo = odo[io];
      if (frozen && last_odo.v_odo == 0.0) shadow_vel.setZero();
      ++io;
    }

    const NavState nav_now = nav_from_filter(fs);
    const Vector3d v_mech = frozen ? shadow_vel : nav_now.vel;
    const bool stat = stops_on && is_stationary(v_mech.norm(), last_odo, opt.v_eps);
    if (stat) {
      if (!frozen) {
        frozen = true;
        shadow_vel = nav_now.vel;
      }
      const BiasState bias_now = bias_from_filter(fs);
      shadow_vel = velocity_step(shadow_vel, imu[k].f_b, bias_now.df, nav_now.q, nav_now.pos,
                                 dt, em);
    } else if (frozen) {
      // Departure: seed the filter with the dynamics the shadow captured.
      NavState seeded = nav_now;
      seeded.vel = shadow_vel;
      set_filter_nav(fs, seeded);
      frozen = false;
    }

    // Freezing halts the inertial propagation only; corrections keep flowing.
    // While stationary the odometer zeros double as zero-velocity updates.
    fs = predict(fs, imu[k], spec, dt, em, stat);
    if (opt.audit) opt.audit(fs);

    if (opt.use_odometer) {
      for (const OdoSample& o : odo_step) {
        Measurement m;
        const NavState n = nav_from_filter(fs);
        m.vel = project_odometer(o.v_odo, n.att);
        m.vel_var = spec.sigma2_odo_vel;
        fs = update(fs, m, em, opt.gate_chi2).fs;
        if (opt.audit) opt.audit(fs);
      }
    }
    while (jf < fixes.size() && fixes[jf].t <= t_now + kTimeTol) {
      const FivegFix& f = fixes[jf];
      ++jf;
      if (f.mode == FixMode::LOS) {
        mode = 1;
        Measurement m;
        m.pos = f.pos;
        m.pos_cov = f.cov;
        fs = update(fs, m, em, opt.gate_chi2).fs;
        if (opt.audit) opt.audit(fs);
      } else {
        mode = 2;
      }
    }

    out.rows.push_back(row_from_filter(fs, mode));
    out.nav.push_back(nav_from_filter(fs));
  }
  return out;
}

RunOutput run_cv_benchmark(const std::vector<FivegFix>& fixes, const Geodetic& anchor,
                           const RunOptions& opt, const EarthModel& em) {
  RunOutput out;
  using Vector6 = Eigen::Matrix<double, 6, 1>;
  using Matrix6 = Eigen::Matrix<double, 6, 6>;
  Vector6 x = Vector6::Zero();
  Matrix6 P = Matrix6::Zero();
  bool started = false;
  double t_prev = 0.0;

  const Radii rd = radii(em, anchor.lat);

  auto push_row = [&](double t, int mode) {
    EstimateRow r;
    r.t = t;
    LocalEnu enu{x[0], x[1], x[2]};
    const Geodetic pos = enu_to_geodetic(em, anchor, enu);
    NavState nav;
    nav.t = t;
    nav.pos = pos;
    nav.vel = Vector3d(x[3], x[4], x[5]);
    FilterState fs;
    fs.t = t;
    set_filter_nav(fs, nav);
    r.x = fs.x;
    r.pdiag[0] = P(1, 1) / std::pow(rd.M + pos.h, 2);
    r.pdiag[1] = P(0, 0) / std::pow((rd.N + pos.h) * std::cos(pos.lat), 2);
    r.pdiag[2] = P(2, 2);
    for (int i = 0; i < 3; ++i) r.pdiag[3 + i] = P(3 + i, 3 + i);
    r.mode = mode;
    out.rows.push_back(r);
    out.nav.push_back(nav);
  };

  for (const FivegFix& f : fixes) {
    if (!started) {
      if (f.mode != FixMode::LOS) continue;
      const LocalEnu enu = geodetic_to_enu(em, anchor, f.pos);
      x << enu.e, enu.n, enu.u, 0.0, 0.0, 0.0;
      P.setZero();
      P.topLeftCorner<3, 3>() = f.cov;
      P.bottomRightCorner<3, 3>() = 25.0 * Matrix3d::Identity();
      started = true;
      t_prev = f.t;
      push_row(f.t, 1);
      continue;
    }
    const double dt = f.t - t_prev;
    t_prev = f.t;
    if (dt > 0.0) {
      Matrix6 F = Matrix6::Identity();
      F.topRightCorner<3, 3>() = dt * Matrix3d::Identity();
      Matrix6 Q = Matrix6::Zero();
      const double q = opt.cv_accel_psd;
      Q.topLeftCorner<3, 3>() = q * std::pow(dt, 3) / 3.0 * Matrix3d::Identity();
      Q.topRightCorner<3, 3>() = q * std::pow(dt, 2) / 2.0 * Matrix3d::Identity();
      Q.bottomLeftCorner<3, 3>() = Q.topRightCorner<3, 3>();
      Q.bottomRightCorner<3, 3>() = q * dt * Matrix3d::Identity();
      x = F * x;
      P = F * P * F.transpose() + Q;
      P = 0.5 * (P + P.transpose()).eval();
    }
    if (f.mode == FixMode::LOS) {
      const LocalEnu enu = geodetic_to_enu(em, anchor, f.pos);
      const Vector3d z = enu.vec();
      Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
      H.leftCols<3>() = Matrix3d::Identity();
      const Matrix3d S = H * P * H.transpose() + f.cov;
      const Eigen::Matrix<double, 6, 3> K = P * H.transpose() * S.inverse();
      x += K * (z - H * x);
      const Matrix6 ikh = Matrix6::Identity() - K * H;
      P = ikh * P * ikh.transpose() + K * f.cov * K.transpose();
      P = 0.5 * (P + P.transpose()).eval();
      push_row(f.t, 1);
    } else {
      push_row(f.t, 2);
    }
  }
  return out;
}

RunOutput run_pipeline(PipelineKind kind, const SensorStreams& streams,
                       const std::vector<BaseStation>& bss, const NavState& reference_init,
                       const SensorSpec& spec, const RunOptions& opt, const EarthModel& em) {
  switch (kind) {
    case PipelineKind::INS_ONLY:
      return run_ins_only(streams.imu, streams.odo, reference_init, spec, opt, em);
    case PipelineKind::INS_ODO: {
      const std::vector<FivegFix> none;
      return run_lc_fusion(streams.imu, streams.odo, none, reference_init, spec, opt, em);
    }
    case PipelineKind::FIVEG_CV: {
      const auto fixes = fixes_from_stream(streams.fiveg, bss, opt, reference_init.pos, em);
      return run_cv_benchmark(fixes, reference_init.pos, opt, em);
    }
    case PipelineKind::FIVEG_OBMS: {
      const auto fixes = fixes_from_stream(streams.fiveg, bss, opt, reference_init.pos, em);
      const NavState init = resolve_init(reference_init, fixes);
      return run_lc_fusion(streams.imu, streams.odo, fixes, init, spec, opt, em);
    }
  }
  throw ConfigError("unknown pipeline kind");
}

}  // namespace navfuse
