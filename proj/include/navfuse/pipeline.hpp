#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navfuse/fiveg.hpp"
#include "navfuse/fusion.hpp"
#include "navfuse/mechanization.hpp"
#include "navfuse/sensors.hpp"

namespace navfuse {

/// Thrown for invalid configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown for missing/corrupt data files or mismatched inputs (CLI exit 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PipelineKind { INS_ONLY, INS_ODO, FIVEG_CV, FIVEG_OBMS };

/// Parse a pipeline name; throws ConfigError listing the valid names.
PipelineKind pipeline_from_name(const std::string& name);
std::string pipeline_name(PipelineKind kind);

/// The three sensor streams of one scenario, time-ordered.
struct SensorStreams {
  std::vector<ImuSample> imu;
  std::vector<OdoSample> odo;
  std::vector<FivegMeasurement> fiveg;
};

/// One estimate epoch: 15 filter states, their covariance diagonal, and the
/// 5G availability flag (0 = pipeline without 5G or before the first 5G
/// epoch, 1 = fused, 2 = standalone-INS bridging).
struct EstimateRow {
  double t = 0.0;
  Vector15 x = Vector15::Zero();
  Vector15 pdiag = Vector15::Zero();
  int mode = 0;
};

struct RunOptions {
  bool bias_removal = true;
  bool stop_mechanism = true;
  bool use_odometer = true;
  double gate_chi2 = 0.0;     // chi^2 innovation gate; <= 0 disables
  double v_eps = 0.1;         // m/s stationarity speed gate
  double static_init = 60.0;  // s of assumed standstill for bias estimation
  double sigma2_h = 0.04;     // m^2 vertical variance of 5G fixes
  double u_ue = 0.0;          // UE height above the anchor plane, m
  double gamma = 0.0;         // NLOS threshold; <= 0 derives the default
  double cv_accel_psd = 4.0;  // m^2/s^3 CV benchmark process noise
  // Observer called after every filter predict and update with the current
  // state; lets callers audit covariance health without rerunning the filter.
  std::function<void(const FilterState&)> audit;
};

struct RunOutput {
  std::vector<EstimateRow> rows;
  std::vector<NavState> nav;
};

/// 5G preprocessing shared by every 5G pipeline: group the measurement stream
/// into epochs, NLOS-test, fix, and fuse. anchor fixes the ENU frame of the
/// BS coordinates.
std::vector<FivegFix> fixes_from_stream(const std::vector<FivegMeasurement>& fiveg,
                                        const std::vector<BaseStation>& bss,
                                        const RunOptions& opt, const Geodetic& anchor,
                                        const EarthModel& em = {});

/// Pure strapdown mechanization (no filter). The odometer feeds only the
/// stopping mechanism. Initial biases come from the static window when
/// bias_removal is on.
RunOutput run_ins_only(const std::vector<ImuSample>& imu, const std::vector<OdoSample>& odo,
                       const NavState& init, const SensorSpec& spec, const RunOptions& opt,
                       const EarthModel& em = {});

/// Loosely-coupled 15-state EKF: predict per IMU epoch, odometer velocity
/// updates, 5G position updates at fused epochs. With an empty fix stream
/// this is exactly the INS/odometer integration.
RunOutput run_lc_fusion(const std::vector<ImuSample>& imu, const std::vector<OdoSample>& odo,
                        const std::vector<FivegFix>& fixes, const NavState& init,
                        const SensorSpec& spec, const RunOptions& opt,
                        const EarthModel& em = {});

/// 6-state ENU constant-velocity benchmark driven by the same fix stream;
/// coasts at the last velocity through INS_ONLY epochs.
RunOutput run_cv_benchmark(const std::vector<FivegFix>& fixes, const Geodetic& anchor,
                           const RunOptions& opt, const EarthModel& em = {});

/// Resolve the initial state: position from the first fused 5G fix when one
/// exists (else the reference), velocity zero, attitude from the reference.
NavState resolve_init(const NavState& reference_init, const std::vector<FivegFix>& fixes);

/// Dispatch one pipeline over one scenario's streams.
RunOutput run_pipeline(PipelineKind kind, const SensorStreams& streams,
                       const std::vector<BaseStation>& bss, const NavState& reference_init,
                       const SensorSpec& spec, const RunOptions& opt,
                       const EarthModel& em = {});

}  // namespace navfuse
