#pragma once

#include <vector>

#include "navfuse/frames.hpp"

namespace navfuse {

/// One IMU epoch: accelerometer specific force and gyro angular rate, b-frame.
struct ImuSample {
  double t = 0.0;
  Vector3d f_b = Vector3d::Zero();  // m/s^2
  Vector3d w_b = Vector3d::Zero();  // rad/s
};

/// One odometer epoch: forward speed, already scaled by wheel radius.
struct OdoSample {
  double t = 0.0;
  double v_odo = 0.0;  // m/s, >= 0
};

/// Stochastic error description of the IMU and odometer channels.
/// Bias variances are the stationary variances of the Gauss-Markov processes;
/// beta values are the inverse correlation times.
struct SensorSpec {
  Vector3d sigma2_gyro_noise = Vector3d::Constant(1e-6);    // (rad/s)^2 per sample
  Vector3d sigma2_accel_noise = Vector3d::Constant(4e-4);   // (m/s^2)^2 per sample
  Vector3d sigma2_gyro_bias = Vector3d::Constant(4e-8);     // (rad/s)^2 stationary
  Vector3d sigma2_accel_bias = Vector3d::Constant(1e-4);    // (m/s^2)^2 stationary
  Vector3d beta_gyro = Vector3d::Constant(1.0 / 300.0);     // 1/s
  Vector3d beta_accel = Vector3d::Constant(1.0 / 300.0);    // 1/s
  Vector3d sigma2_odo_vel = Vector3d::Constant(0.01);       // (m/s)^2 per ENU axis
};

/// Slowly varying additive sensor biases (gyro then accel).
struct BiasState {
  Vector3d dw = Vector3d::Zero();  // rad/s
  Vector3d df = Vector3d::Zero();  // m/s^2
};

/// Mean gyro output over a stationary window. Absorbs Earth rate into the
/// estimate by design; commercial-grade biases dwarf it.
/// Throws if the window spans less than min_duration seconds; if spec is
/// given, throws when any axis variance exceeds 10x the spec noise
/// (stationarity violated).
Vector3d estimate_gyro_bias(const std::vector<ImuSample>& window,
                            double min_duration = 10.0,
                            const SensorSpec* spec = nullptr);

/// Accelerometer bias from a stationary window: mean(f_b) - R_l^b [0,0,g].
Vector3d estimate_accel_bias(const std::vector<ImuSample>& window,
                             const Attitude& att0, double g,
                             double min_duration = 10.0,
                             const SensorSpec* spec = nullptr);

/// One first-order Gauss-Markov step: b' = (1 - beta dt) b + sqrt(2 beta dt) sigma_B n,
/// where `noise` holds the six standard-normal draws (gyro xyz, accel xyz),
/// or zero for the deterministic mean decay.
BiasState gm_propagate(const BiasState& b, const SensorSpec& spec, double dt,
                       const Eigen::Matrix<double, 6, 1>& noise);
BiasState gm_propagate(const BiasState& b, const SensorSpec& spec, double dt);

/// Stationarity test: mechanized speed at or below v_eps and a strictly zero
/// odometer reading.
bool is_stationary(double v_mech, const OdoSample& odo, double v_eps);

}  // namespace navfuse
