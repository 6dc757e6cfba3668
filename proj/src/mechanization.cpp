#include "navfuse/mechanization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace navfuse {

namespace {
constexpr double kPoleGuard = 1e-6;  // rad from |lat| = pi/2

void check_polar(double lat, const char* who) {
  if (std::abs(std::abs(lat) - std::numbers::pi / 2.0) < kPoleGuard) {
    throw std::domain_error(std::string(who) + ": latitude at polar singularity");
  }
}
}  // namespace

Vector3d earth_rate_l(const EarthModel& em, double lat) {
  return {0.0, em.omega_e * std::cos(lat), em.omega_e * std::sin(lat)};
}

Vector3d transport_rate(const EarthModel& em, const Vector3d& vel, const Geodetic& pos) {
  check_polar(pos.lat, "transport_rate");
  const Radii r = radii(em, pos.lat);
  return {-vel.y() / (r.M + pos.h),
          vel.x() / (r.N + pos.h),
          vel.x() * std::tan(pos.lat) / (r.N + pos.h)};
}

Vector3d correct_gyro(const Vector3d& w_b, const Vector3d& dw, const Quaternion& q,
                      const Vector3d& vel, const Geodetic& pos, const EarthModel& em) {
  const Vector3d w_in_l = earth_rate_l(em, pos.lat) + transport_rate(em, vel, pos);
  return (w_b - dw) - q.conjugate() * w_in_l;
}

Quaternion attitude_step(const Quaternion& q, const Vector3d& w_lb_b, double dt) {
  // q_dot = 1/2 q (x) (0, w_lb^b); first order in dt, renormalized.
  const Quaternion qw(0.0, w_lb_b.x(), w_lb_b.y(), w_lb_b.z());
  const Quaternion qdot = q * qw;
  Quaternion out(q.w() + 0.5 * qdot.w() * dt, q.x() + 0.5 * qdot.x() * dt,
                 q.y() + 0.5 * qdot.y() * dt, q.z() + 0.5 * qdot.z() * dt);
  out.normalize();
  return out;
}

Vector3d velocity_step(const Vector3d& v_l, const Vector3d& f_b, const Vector3d& df,
                       const Quaternion& q, const Geodetic& pos, double dt,
                       const EarthModel& em) {
  const Vector3d f_l = q * (f_b - df);
  const Vector3d w_cor = 2.0 * earth_rate_l(em, pos.lat) + transport_rate(em, v_l, pos);
  const Vector3d g_l(0.0, 0.0, -em.gravity(pos.lat, pos.h));
  return v_l + (f_l - w_cor.cross(v_l) + g_l) * dt;
}

Geodetic position_step(const EarthModel& em, const Geodetic& pos, const Vector3d& v_new,
                       double dt) {
  check_polar(pos.lat, "position_step");
  const Radii r = radii(em, pos.lat);
  Geodetic out;
  out.lat = pos.lat + v_new.y() / (r.M + pos.h) * dt;
  out.lon = pos.lon + v_new.x() / ((r.N + pos.h) * std::cos(pos.lat)) * dt;
  out.h = pos.h + v_new.z() * dt;
  return out;
}

Vector3d project_odometer(double v_odo, const Attitude& att) {
  const double cp = std::cos(att.p);
  return {std::sin(att.a) * cp * v_odo, std::cos(att.a) * cp * v_odo,
          std::sin(att.p) * v_odo};
}

NavState mech_step(const NavState& s, const Vector3d& f_b, const Vector3d& w_b,
                   const BiasState& bias, double dt, const EarthModel& em) {
  NavState out;
  out.t = s.t + dt;
  const Vector3d w_lb = correct_gyro(w_b, bias.dw, s.q, s.vel, s.pos, em);
  out.q = attitude_step(s.q, w_lb, dt);
  out.vel = velocity_step(s.vel, f_b, bias.df, out.q, s.pos, dt, em);
  out.pos = position_step(em, s.pos, out.vel, dt);
  out.att = attitude_from_quat(out.q);
  return out;
}

Mechanizer::Mechanizer(const NavState& init, const BiasState& bias, const MechConfig& cfg)
    : state_(init), bias_(bias), cfg_(cfg) {
  last_odo_.t = init.t;
  last_odo_.v_odo = 0.0;
}

void Mechanizer::on_odo(const OdoSample& odo) {
  last_odo_ = odo;
  // A fresh odometer zero re-anchors the shadow integration, so residual
  // accelerometer error can only accumulate for one odometer period.
  if (frozen_ && odo.v_odo == 0.0) shadow_vel_.setZero();
}

const NavState& Mechanizer::step(const ImuSample& imu) {
  if (!has_prev_) {
    // First sample pins the clock; integration starts with the second.
    has_prev_ = true;
    state_.t = imu.t;
    return state_;
  }
  const double dt = imu.t - state_.t;
  if (dt <= 0.0) throw std::runtime_error("mechanize: non-monotonic IMU timestamps");

  const Vector3d v_mech = frozen_ ? shadow_vel_ : state_.vel;
  const bool stat = is_stationary(v_mech.norm(), last_odo_, cfg_.v_eps);
  if (cfg_.stop_mechanism && stat) {
    if (!frozen_) {
      frozen_ = true;
      shadow_vel_ = state_.vel;
      stop_t0_ = state_.t;
      stop_gyro_sum_.setZero();
      stop_gyro_n_ = 0;
    }
    state_.t = imu.t;
    state_.vel.setZero();
    shadow_vel_ =
        velocity_step(shadow_vel_, imu.f_b, bias_.df, state_.q, state_.pos, dt, cfg_.earth);
    stop_gyro_sum_ += imu.w_b;
    ++stop_gyro_n_;
    if (cfg_.rezero_gyro_at_stops && imu.t - stop_t0_ >= cfg_.rezero_min_duration) {
      bias_.dw = stop_gyro_sum_ / static_cast<double>(stop_gyro_n_);
    }
    return state_;
  }
  if (frozen_) {
    // Departure: carry the dynamics captured by the shadow integration.
    state_.vel = shadow_vel_;
    frozen_ = false;
  }
  state_ = mech_step(state_, imu.f_b, imu.w_b, bias_, dt, cfg_.earth);
  return state_;
}

std::vector<NavState> mechanize(const std::vector<ImuSample>& imu,
                                const std::vector<OdoSample>& odo,
                                const NavState& init, const BiasState& bias,
                                const MechConfig& cfg, int* gap_flags) {
  Mechanizer mech(init, bias, cfg);
  std::vector<NavState> out;
  out.reserve(imu.size());
  std::size_t oi = 0;
  double nominal = imu.size() > 1 ? (imu.back().t - imu.front().t) / double(imu.size() - 1) : 0.0;
  int gaps = 0;
  double prev_t = imu.empty() ? 0.0 : imu.front().t;
  for (const auto& s : imu) {
    while (oi < odo.size() && odo[oi].t <= s.t) mech.on_odo(odo[oi++]);
    if (nominal > 0.0 && s.t - prev_t > 10.0 * nominal) ++gaps;
    prev_t = s.t;
    out.push_back(mech.step(s));
  }
  if (gap_flags) *gap_flags = gaps;
  return out;
}

}  // namespace navfuse
