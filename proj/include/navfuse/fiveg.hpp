#pragma once

#include <optional>
#include <vector>

#include "navfuse/frames.hpp"

namespace navfuse {

/// mmWave base station site. Carrier and bandwidth are metadata only.
struct BaseStation {
  int id = 0;
  LocalEnu pos;
  double boresight = 0.0;       // rad, ULA orientation
  double carrier = 28e9;        // Hz
  double bandwidth = 400e6;     // Hz
};

/// Per-BS measurement at one 5G epoch. `aod` is the canonical
/// azimuth-from-north of the BS->UE direction; rx_power_range is the
/// power-derived range used only by the NLOS consistency test.
struct FivegMeasurement {
  double t = 0.0;
  int bs_id = 0;
  double rtt_range = 0.0;       // m
  double aod = 0.0;             // rad
  double rx_power_range = 0.0;  // m
  double sigma_range = 0.3;     // m
  double sigma_aod = 0.0175;    // rad
};

enum class FixMode { LOS, TOTAL_NLOS };

/// Fused position fix for one epoch. cov is ENU meters^2.
struct FivegFix {
  double t = 0.0;
  Geodetic pos;
  Matrix3d cov = Matrix3d::Zero();
  int n_bs_used = 0;
  FixMode mode = FixMode::TOTAL_NLOS;
};

/// Range, horizontal angle (counterclockwise from the x/east axis), and
/// elevation of the UE as seen from the BS. Throws when the horizontal
/// separation vanishes (angle undefined).
struct RangeAngles {
  double r = 0.0;
  double theta_ccw = 0.0;
  double psi = 0.0;
};
RangeAngles range_and_angles(const LocalEnu& ue, const LocalEnu& bs);

/// Conversion between the counterclockwise-from-east angle and the canonical
/// azimuth-from-north stored in FivegMeasurement.
double azimuth_from_ccw(double theta_ccw);

/// Horizontal UE position from one measurement under the constant-height
/// assumption: r_2D = sqrt(r^2 - dz^2), x = r_2D sin(aod) + x_BS,
/// y = r_2D cos(aod) + y_BS. Throws when r < |dz|.
Eigen::Vector2d fix_from_measurement(const FivegMeasurement& m, const BaseStation& bs,
                                     double h_ue);

/// First-order 2x2 covariance of a per-BS fix: range error maps along the
/// bearing (scaled by r/r_2D), r_2D * sigma_aod across it.
Eigen::Matrix2d fix_covariance(const FivegMeasurement& m, const BaseStation& bs,
                               double h_ue);

/// NLOS consistency test: the two range estimates disagree by more than gamma.
bool nlos_detect(const FivegMeasurement& m, double gamma);

/// Default NLOS threshold: 5x the combined standard deviation of the two
/// range estimates.
double default_nlos_gamma(double sigma_range, double sigma_pwr_range);

struct PerBsFix {
  Eigen::Vector2d xy = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

/// Information-form fusion of per-BS fixes:
/// mean = (sum C_i^-1)^-1 sum C_i^-1 mu_i, cov = (sum C_i^-1)^-1.
/// Empty input yields a TOTAL_NLOS fix with no position. The vertical channel
/// carries the constant-height assumption with variance sigma2_h.
FivegFix fuse_multibs(const std::vector<PerBsFix>& fixes, double t, double h_ue,
                      double sigma2_h, const EarthModel& em, const Geodetic& anchor);

enum class EpochMode { FUSED, INS_ONLY };

/// Total-outage switch: INS_ONLY exactly when no BS passed the LOS test.
EpochMode switch_mode(int n_los);

/// Per-epoch 5G processing: NLOS-test each measurement, fix and fuse the LOS
/// ones. Measurements must share one timestamp. Returns the fused fix
/// (TOTAL_NLOS when nothing survives).
FivegFix process_epoch(const std::vector<FivegMeasurement>& epoch,
                       const std::vector<BaseStation>& bss, double gamma,
                       double h_ue, double sigma2_h, const EarthModel& em,
                       const Geodetic& anchor);

/// Group a time-ordered measurement stream into epochs and process each.
std::vector<FivegFix> process_stream(const std::vector<FivegMeasurement>& stream,
                                     const std::vector<BaseStation>& bss, double gamma,
                                     double h_ue, double sigma2_h, const EarthModel& em,
                                     const Geodetic& anchor);

}  // namespace navfuse
