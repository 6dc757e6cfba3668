#pragma once

#include <optional>
#include <vector>

#include "navfuse/frames.hpp"
#include "navfuse/sensors.hpp"

namespace navfuse {

/// Full navigation solution at one epoch. The quaternion is the authoritative
/// attitude; att is kept in lock-step for readout.
struct NavState {
  double t = 0.0;
  Geodetic pos;
  Vector3d vel = Vector3d::Zero();  // ENU m/s
  Attitude att;
  Quaternion q = Quaternion::Identity();
};

struct MechConfig {
  double v_eps = 0.1;                 // m/s, stationarity speed gate
  bool stop_mechanism = true;         // freeze PVA while stationary
  bool initial_bias_removal = true;   // consumed by the pipeline layer
  bool rezero_gyro_at_stops = true;   // re-estimate gyro bias during long stops
  double rezero_min_duration = 2.0;   // s of sustained stationarity before re-zeroing
  EarthModel earth;
};

/// Earth rotation rate resolved in ENU: (0, w_e cos(lat), w_e sin(lat)).
Vector3d earth_rate_l(const EarthModel& em, double lat);

/// Transport rate of the l-frame over the ellipsoid:
/// (-v_n/(M+h), v_e/(N+h), v_e tan(lat)/(N+h)).
/// Throws within 1e-6 rad of the poles (tan singularity).
Vector3d transport_rate(const EarthModel& em, const Vector3d& vel, const Geodetic& pos);

/// Body rate relative to the l-frame: (w_b - dw) - R_l^b (w_ie + w_el).
Vector3d correct_gyro(const Vector3d& w_b, const Vector3d& dw, const Quaternion& q,
                      const Vector3d& vel, const Geodetic& pos, const EarthModel& em);

/// First-order quaternion integration, renormalized every step.
Quaternion attitude_step(const Quaternion& q, const Vector3d& w_lb_b, double dt);

/// Velocity update with Coriolis/transport correction and gravity, g_l = (0,0,-g).
Vector3d velocity_step(const Vector3d& v_l, const Vector3d& f_b, const Vector3d& df,
                       const Quaternion& q, const Geodetic& pos, double dt,
                       const EarthModel& em);

/// Curvilinear position update from the already-updated velocity.
/// Throws within 1e-6 rad of the poles.
Geodetic position_step(const EarthModel& em, const Geodetic& pos, const Vector3d& v_new,
                       double dt);

/// Odometer speed resolved to ENU through the attitude:
/// (sin a cos p, cos a cos p, sin p) * v_odo.
Vector3d project_odometer(double v_odo, const Attitude& att);

/// One full strapdown step (attitude, then velocity with the new attitude,
/// then position with the new velocity). No stop logic; shared by the
/// mechanizer loop and the filter's prediction.
NavState mech_step(const NavState& s, const Vector3d& f_b, const Vector3d& w_b,
                   const BiasState& bias, double dt, const EarthModel& em);

/// Stateful strapdown integrator with the stopping mechanism.
/// Feed odometer samples as they arrive; step() consumes one IMU sample and
/// returns the updated state.
class Mechanizer {
 public:
  Mechanizer(const NavState& init, const BiasState& bias, const MechConfig& cfg);

  void on_odo(const OdoSample& odo);
  const NavState& step(const ImuSample& imu);

  const NavState& state() const { return state_; }
  const BiasState& bias() const { return bias_; }
  bool frozen() const { return frozen_; }

 private:
  NavState state_;
  BiasState bias_;
  MechConfig cfg_;
  OdoSample last_odo_;
  bool has_prev_ = false;
  bool frozen_ = false;
  // The stationarity test reads the live mechanized velocity. While frozen,
  // that velocity keeps integrating here (re-zeroed by every fresh odometer
  // zero) so a departure trips the threshold within a sample or two instead
  // of waiting out the odometer period.
  Vector3d shadow_vel_ = Vector3d::Zero();
  // Expanding stationary window for in-stop gyro re-zeroing.
  double stop_t0_ = 0.0;
  Vector3d stop_gyro_sum_ = Vector3d::Zero();
  long stop_gyro_n_ = 0;
};

/// Batch mechanization: one NavState per IMU sample. Odometer samples are
/// associated with the nearest preceding IMU epoch.
/// Throws on non-monotonic timestamps; a gap above 10x the nominal period is
/// tolerated but flagged via the optional counter.
std::vector<NavState> mechanize(const std::vector<ImuSample>& imu,
                                const std::vector<OdoSample>& odo,
                                const NavState& init, const BiasState& bias,
                                const MechConfig& cfg, int* gap_flags = nullptr);

}  // namespace navfuse
