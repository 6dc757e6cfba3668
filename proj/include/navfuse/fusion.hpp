#pragma once

#include <optional>
#include <vector>

#include "navfuse/fiveg.hpp"
#include "navfuse/frames.hpp"
#include "navfuse/mechanization.hpp"
#include "navfuse/sensors.hpp"

namespace navfuse {

using Vector15 = Eigen::Matrix<double, 15, 1>;
using Matrix15 = Eigen::Matrix<double, 15, 15>;
using Matrix12 = Eigen::Matrix<double, 12, 12>;
using Matrix15x12 = Eigen::Matrix<double, 15, 12>;

// State ordering, fixed across the module:
//   0 lat, 1 lon, 2 h, 3 v_e, 4 v_n, 5 v_u, 6 p, 7 r, 8 a,
//   9..11 gyro bias, 12..14 accel bias.
struct FilterState {
  double t = 0.0;
  Vector15 x = Vector15::Zero();
  Matrix15 P = Matrix15::Zero();
};

/// Measurement for one update: either part may be absent.
struct Measurement {
  std::optional<Geodetic> pos;           // from a 5G fix
  Matrix3d pos_cov = Matrix3d::Zero();   // ENU m^2
  std::optional<Vector3d> vel;           // projected odometer, ENU m/s
  Vector3d vel_var = Vector3d::Zero();   // (m/s)^2 per axis
};

NavState nav_from_filter(const FilterState& fs);
BiasState bias_from_filter(const FilterState& fs);
void set_filter_nav(FilterState& fs, const NavState& nav);
void set_filter_bias(FilterState& fs, const BiasState& b);

/// First-order transition matrix I + F dt. The nine PVA error-dynamics blocks
/// are the exact linearization of one mechanization step in this state
/// parameterization; the bias-coupling blocks carry the sign and Euler-rate
/// mapping that the bias-subtracting mechanization implies. f_b and w_b must
/// already be bias-compensated.
Matrix15 assemble_phi(const NavState& nav, const Vector3d& f_b, const Vector3d& w_b,
                      const SensorSpec& spec, double dt, const EarthModel& em);

/// Transition matrix of the frozen (stationary, stop-mechanism) step: PVA
/// held, biases decay.
Matrix15 assemble_phi_frozen(const SensorSpec& spec, double dt);

/// Continuous process-noise covariance, diagonal:
/// (gyro noise, accel noise, gyro-bias driving, accel-bias driving).
Matrix12 build_Q(const SensorSpec& spec);

/// Noise-coupling matrix: accel noise into velocity rows and gyro noise into
/// attitude rows through R_b^l; sqrt(2 beta) into the bias rows.
Matrix15x12 build_G(const NavState& nav, const SensorSpec& spec);

/// One prediction step: nonlinear mechanization for the mean (or a frozen
/// hold), Gauss-Markov decay for the biases, first-order covariance
/// propagation P <- Phi P Phi^T + G Q G^T dt, symmetrized.
FilterState predict(const FilterState& fs, const ImuSample& imu, const SensorSpec& spec,
                    double dt, const EarthModel& em, bool frozen = false);

struct UpdateOutcome {
  FilterState fs;
  bool applied = true;     // false when the innovation gate rejected
  double chi2 = 0.0;
};

/// Measurement update. Position rows are identity in (lat, lon, h) radians;
/// the meter-valued 5G covariance diagonal is converted through (M+h) and
/// (N+h)cos(lat). Joseph-form covariance update. gate_chi2 <= 0 disables
/// gating.
UpdateOutcome update(const FilterState& fs, const Measurement& z, const EarthModel& em,
                     double gate_chi2 = 0.0);

}  // namespace navfuse
