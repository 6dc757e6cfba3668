#include "navfuse/sensors.hpp"

#include <cmath>
#include <stdexcept>

namespace navfuse {

namespace {

struct WindowStats {
  Vector3d mean;
  Vector3d var;
};

WindowStats accumulate(const std::vector<ImuSample>& window, bool gyro) {
  Vector3d sum = Vector3d::Zero();
  for (const auto& s : window) sum += gyro ? s.w_b : s.f_b;
  const double n = static_cast<double>(window.size());
  const Vector3d mean = sum / n;
  Vector3d ss = Vector3d::Zero();
  for (const auto& s : window) {
    const Vector3d d = (gyro ? s.w_b : s.f_b) - mean;
    ss += d.cwiseProduct(d);
  }
  return {mean, ss / n};
}

void check_window(const std::vector<ImuSample>& window, double min_duration) {
  if (window.empty()) throw std::invalid_argument("bias window is empty");
  const double span = window.back().t - window.front().t;
  if (span < min_duration) {
    throw std::invalid_argument("bias window shorter than required minimum");
  }
}

void check_stationarity(const Vector3d& var, const Vector3d& spec_var) {
  for (int i = 0; i < 3; ++i) {
    if (var[i] > 10.0 * spec_var[i]) {
      throw std::runtime_error("bias window not stationary: variance exceeds 10x spec noise");
    }
  }
}

}  // namespace

Vector3d estimate_gyro_bias(const std::vector<ImuSample>& window,
                            double min_duration, const SensorSpec* spec) {
  check_window(window, min_duration);
  const WindowStats st = accumulate(window, true);
  if (spec) check_stationarity(st.var, spec->sigma2_gyro_noise);
  return st.mean;
}

Vector3d estimate_accel_bias(const std::vector<ImuSample>& window,
                             const Attitude& att0, double g,
                             double min_duration, const SensorSpec* spec) {
  check_window(window, min_duration);
  const WindowStats st = accumulate(window, false);
  if (spec) check_stationarity(st.var, spec->sigma2_accel_noise);
  const Matrix3d R_lb = rotation_body_to_local(att0).transpose();
  return st.mean - R_lb * Vector3d(0.0, 0.0, g);
}

BiasState gm_propagate(const BiasState& b, const SensorSpec& spec, double dt,
                       const Eigen::Matrix<double, 6, 1>& noise) {
  BiasState out;
  for (int i = 0; i < 3; ++i) {
    const double bw = spec.beta_gyro[i];
    const double bf = spec.beta_accel[i];
    out.dw[i] = (1.0 - bw * dt) * b.dw[i] +
                std::sqrt(2.0 * bw * dt * spec.sigma2_gyro_bias[i]) * noise[i];
    out.df[i] = (1.0 - bf * dt) * b.df[i] +
                std::sqrt(2.0 * bf * dt * spec.sigma2_accel_bias[i]) * noise[3 + i];
  }
  return out;
}

BiasState gm_propagate(const BiasState& b, const SensorSpec& spec, double dt) {
  return gm_propagate(b, spec, dt, Eigen::Matrix<double, 6, 1>::Zero());
}

bool is_stationary(double v_mech, const OdoSample& odo, double v_eps) {
  return std::abs(v_mech) <= v_eps && odo.v_odo == 0.0;
}

}  // namespace navfuse
