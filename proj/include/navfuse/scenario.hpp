#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navfuse/fiveg.hpp"
#include "navfuse/frames.hpp"
#include "navfuse/mechanization.hpp"
#include "navfuse/sensors.hpp"

namespace navfuse {

/// Ground-truth container at one epoch: full nav solution plus the ideal
/// b-frame sensor values that mechanize back to it.
struct TruthSample {
  double t = 0.0;
  NavState nav;
  Vector3d f_b = Vector3d::Zero();
  Vector3d w_b = Vector3d::Zero();
};

/// One waypoint of the driven path, local ENU meters. dwell > 0 marks a
/// traffic stop at this (collinear) waypoint.
struct Waypoint {
  double e = 0.0;
  double n = 0.0;
  double dwell = 0.0;
};

struct OutageWindow {
  double start = 0.0;
  double duration = 0.0;
};

/// 5G synthesis controls. Shadowing marks non-nearest base stations NLOS in
/// persistent seeded windows; the nearest visible BS stays LOS outside
/// scheduled outages so that total outages occur exactly on schedule.
struct FivegSpec {
  double sigma_range = 0.3;        // m, RTT range noise
  double sigma_aod = 0.017453293;  // rad, AOD noise (default 1 deg)
  double sigma_pwr = 3.0;          // m, power-derived range noise
  double nlos_excess = 50.0;       // m added to the power range when NLOS
  double max_range = 300.0;        // m visibility cutoff
  double sigma2_h = 0.04;          // m^2, constant-height channel variance
  double p_block = 0.0;            // shadowing probability per window
  double block_window = 12.0;      // s, shadowing persistence
};

struct BsConfig {
  double spacing = 250.0;
  double lateral_offset = 15.0;
  double height = 10.0;
};

struct OdoConfig {
  double resolution = 0.1;  // m/s quantization step, zero-clamped below it
  double noise_std = 0.0;   // m/s white noise before quantization
};

struct Scenario {
  std::string name = "scenario";
  Geodetic anchor{43.65 * 0.017453292519943295, -79.44 * 0.017453292519943295,
                  100.0};  // 43.65N 79.44W
  std::vector<Waypoint> waypoints;
  double cruise_speed = 8.2;     // m/s
  double turn_radius = 20.0;     // m fillet radius at corners
  double accel_limit = 2.0;      // m/s^2 longitudinal
  double initial_static = 60.0;  // s parked before moving
  double final_static = 5.0;     // s parked at the end
  double imu_rate = 20.0;
  double odo_rate = 1.0;
  double fiveg_rate = 5.0;
  double ref_rate = 5.0;         // truth reference output rate
  double u_ue = 0.0;             // UE height above the anchor plane, m
  BsConfig bs;
  FivegSpec fiveg;
  OdoConfig odo;
  SensorSpec sensors;
  BiasState bias_truth;
  std::vector<OutageWindow> outages;
  std::uint64_t seed = 20260822;
};

/// Closed-form C^1 path: straight legs joined by circular-arc fillets, driven
/// with trapezoidal speed phases and stop dwells. All evaluation is exact in
/// arc length and time.
class Trajectory {
 public:
  struct Kinematics {
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();
    Eigen::Vector2d vel = Eigen::Vector2d::Zero();
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    double azimuth = 0.0;   // rad, clockwise from north
    double speed = 0.0;
    double azimuth_rate = 0.0;
  };

  Trajectory(const std::vector<Waypoint>& wps, double cruise, double turn_radius,
             double accel_limit, double initial_static, double final_static,
             double max_lateral_g = 0.4);

  double duration() const { return total_time_; }
  double path_length() const { return total_length_; }
  Kinematics eval(double t) const;
  /// Time at which the path position first reaches arc length s.
  double time_at_arclength(double s) const;
  /// Arc length of the j-th corner arc midpoint (fillet order along the path).
  std::vector<double> corner_arclengths() const { return corner_mid_s_; }

 private:
  struct Segment {  // geometry, indexed by arc length
    bool arc = false;
    double s0 = 0.0, len = 0.0;
    Eigen::Vector2d p0 = Eigen::Vector2d::Zero();  // line start
    Eigen::Vector2d dir = Eigen::Vector2d::Zero();  // line unit direction
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    double phi0 = 0.0;   // start angle of the radius vector
    double sign = 1.0;   // +1 right turn (azimuth increasing)
  };
  struct Phase {  // motion, indexed by time
    double t0 = 0.0, dt = 0.0;
    double s0 = 0.0, v0 = 0.0, a = 0.0;
  };

  void geometry_at(double s, Eigen::Vector2d* pos, double* azimuth, double* kappa) const;

  std::vector<Segment> segments_;
  std::vector<Phase> phases_;
  std::vector<double> corner_mid_s_;
  double total_length_ = 0.0;
  double total_time_ = 0.0;
};

/// Sample a trajectory into a truth stream at a fixed rate (timestamps i/rate).
/// f_b/w_b are left zero; inverse_mechanize fills them.
std::vector<TruthSample> generate_trajectory(const Trajectory& traj, const Geodetic& anchor,
                                             double u_ue, double rate,
                                             const EarthModel& em);

/// Convenience overload building the Trajectory from scenario-style inputs.
std::vector<TruthSample> generate_trajectory(const std::vector<Waypoint>& wps,
                                             double cruise, double rate,
                                             const Geodetic& anchor,
                                             const EarthModel& em,
                                             double turn_radius = 20.0,
                                             double accel_limit = 2.0);

/// Ideal IMU stream that mechanizes back onto the truth: inverts the discrete
/// attitude/velocity updates between consecutive truth epochs, including
/// Earth-rate, transport-rate, Coriolis, and gravity content.
std::vector<ImuSample> inverse_mechanize(const std::vector<TruthSample>& truth,
                                         const EarthModel& em);

/// Ideal odometer stream sampled from truth speed at the odometer rate.
std::vector<OdoSample> perfect_odometer(const std::vector<TruthSample>& truth,
                                        double odo_rate);

/// Corrupt an ideal IMU stream: Gauss-Markov biases (initialized at the truth
/// bias) plus white noise per spec. Timestamps preserved.
std::vector<ImuSample> corrupt_imu(const std::vector<ImuSample>& perfect,
                                   const SensorSpec& spec, const BiasState& bias_truth,
                                   std::uint64_t seed);

/// Corrupt an ideal odometer stream: white noise, flooring at zero, then
/// quantization (zero-clamped below one resolution step).
std::vector<OdoSample> corrupt_odo(const std::vector<OdoSample>& perfect,
                                   const OdoConfig& cfg, std::uint64_t seed);

/// Base stations every `spacing` meters of arc length along the truth path,
/// offset laterally to alternating sides, endpoints included (the far
/// endpoint is dropped when the path closes on itself).
std::vector<BaseStation> deploy_bs(const std::vector<TruthSample>& truth, double spacing,
                                   double lateral_offset = 15.0, double height = 10.0,
                                   const EarthModel& em = {});

struct FivegRecord {
  FivegMeasurement meas;
  bool los_truth = true;
};

/// Per 5G epoch and visible BS: true range/angle plus Gaussian noise; during
/// scheduled outages every BS is NLOS (power range inflated by nlos_excess);
/// otherwise seeded persistent shadowing may block non-nearest BSs.
std::vector<FivegRecord> synthesize_5g(const std::vector<TruthSample>& truth_5g,
                                       const std::vector<BaseStation>& bss,
                                       const std::vector<OutageWindow>& schedule,
                                       const FivegSpec& spec, std::uint64_t seed,
                                       const EarthModel& em = {});

/// The shipped desk-scale configuration: a ~9 km clockwise loop with traffic
/// stops, four outages of 13/8/20/100 s starting at the four corners, 250 m
/// BS spacing, and tight 5G noise.
Scenario reference_scenario();

/// Build the Trajectory object a scenario describes (shared by simulate and
/// the reference-scenario outage placement).
Trajectory scenario_trajectory(const Scenario& sc);

struct SimResult {
  std::vector<TruthSample> truth_imu;   // IMU-rate truth with f_b/w_b filled
  std::vector<TruthSample> truth_ref;   // reference-rate truth
  std::vector<ImuSample> imu_perfect;
  std::vector<ImuSample> imu;
  std::vector<OdoSample> odo_perfect;
  std::vector<OdoSample> odo;
  std::vector<FivegRecord> fiveg;
  std::vector<BaseStation> bss;
};

/// Run the full deterministic generation chain for a scenario.
SimResult simulate(const Scenario& sc, const EarthModel& em = {});

}  // namespace navfuse
