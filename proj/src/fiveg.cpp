#include "navfuse/fiveg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace navfuse {

RangeAngles range_and_angles(const LocalEnu& ue, const LocalEnu& bs) {
  const double dx = ue.e - bs.e;
  const double dy = ue.n - bs.n;
  const double dz = ue.u - bs.u;
  RangeAngles out;
  out.r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (out.r == 0.0) throw std::domain_error("range_and_angles: coincident UE and BS");
  if (dx == 0.0 && dy == 0.0) {
    throw std::domain_error("range_and_angles: vertical geometry, horizontal angle undefined");
  }
  out.theta_ccw = std::atan2(dy, dx);
  out.psi = std::asin(std::clamp(dz / out.r, -1.0, 1.0));
  return out;
}

double azimuth_from_ccw(double theta_ccw) {
  return wrap_azimuth(std::numbers::pi / 2.0 - theta_ccw);
}

Eigen::Vector2d fix_from_measurement(const FivegMeasurement& m, const BaseStation& bs,
                                     double h_ue) {
  const double dz = h_ue - bs.pos.u;
  const double under = m.rtt_range * m.rtt_range - dz * dz;
  if (under < 0.0) {
    throw std::domain_error("fix_from_measurement: range below height separation");
  }
  const double r2d = std::sqrt(under);
  return {r2d * std::sin(m.aod) + bs.pos.e, r2d * std::cos(m.aod) + bs.pos.n};
}

Eigen::Matrix2d fix_covariance(const FivegMeasurement& m, const BaseStation& bs,
                               double h_ue) {
  const double dz = h_ue - bs.pos.u;
  const double r2d = std::sqrt(std::max(m.rtt_range * m.rtt_range - dz * dz, 1e-12));
  // Unit vectors along and across the BS->UE bearing.
  const Eigen::Vector2d u_along(std::sin(m.aod), std::cos(m.aod));
  const Eigen::Vector2d u_across(std::cos(m.aod), -std::sin(m.aod));
  const double s_along = (m.rtt_range / r2d) * m.sigma_range;
  const double s_across = r2d * m.sigma_aod;
  return s_along * s_along * u_along * u_along.transpose() +
         s_across * s_across * u_across * u_across.transpose();
}

bool nlos_detect(const FivegMeasurement& m, double gamma) {
  return std::abs(m.rtt_range - m.rx_power_range) > gamma;
}

double default_nlos_gamma(double sigma_range, double sigma_pwr_range) {
  return 5.0 * std::sqrt(sigma_range * sigma_range + sigma_pwr_range * sigma_pwr_range);
}

FivegFix fuse_multibs(const std::vector<PerBsFix>& fixes, double t, double h_ue,
                      double sigma2_h, const EarthModel& em, const Geodetic& anchor) {
  FivegFix out;
  out.t = t;
  if (fixes.empty()) {
    out.mode = FixMode::TOTAL_NLOS;
    return out;
  }
  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  for (const auto& f : fixes) {
    const Eigen::Matrix2d ci = f.cov.inverse();
    info += ci;
    rhs += ci * f.xy;
  }
  const Eigen::Matrix2d cov2 = info.inverse();
  const Eigen::Vector2d mean = cov2 * rhs;
  LocalEnu enu;
  enu.e = mean.x();
  enu.n = mean.y();
  enu.u = h_ue;  // h_ue is the UE height above the anchor plane (ENU u)
  out.pos = enu_to_geodetic(em, anchor, enu);
  out.cov.setZero();
  out.cov.topLeftCorner<2, 2>() = 0.5 * (cov2 + cov2.transpose());
  out.cov(2, 2) = sigma2_h;
  out.n_bs_used = static_cast<int>(fixes.size());
  out.mode = FixMode::LOS;
  return out;
}

EpochMode switch_mode(int n_los) {
  return n_los == 0 ? EpochMode::INS_ONLY : EpochMode::FUSED;
}

FivegFix process_epoch(const std::vector<FivegMeasurement>& epoch,
                       const std::vector<BaseStation>& bss, double gamma,
                       double h_ue, double sigma2_h, const EarthModel& em,
                       const Geodetic& anchor) {
  std::vector<PerBsFix> los;
  double t = epoch.empty() ? 0.0 : epoch.front().t;
  for (const auto& m : epoch) {
    if (nlos_detect(m, gamma)) continue;
    auto it = std::find_if(bss.begin(), bss.end(),
                           [&](const BaseStation& b) { return b.id == m.bs_id; });
    if (it == bss.end()) continue;
    PerBsFix f;
    try {
      f.xy = fix_from_measurement(m, *it, h_ue);
    } catch (const std::domain_error&) {
      continue;  // geometry impossible, reject measurement
    }
    f.cov = fix_covariance(m, *it, h_ue);
    los.push_back(f);
  }
  return fuse_multibs(los, t, h_ue, sigma2_h, em, anchor);
}

std::vector<FivegFix> process_stream(const std::vector<FivegMeasurement>& stream,
                                     const std::vector<BaseStation>& bss, double gamma,
                                     double h_ue, double sigma2_h, const EarthModel& em,
                                     const Geodetic& anchor) {
  std::vector<FivegFix> out;
  std::size_t i = 0;
  while (i < stream.size()) {
    std::size_t j = i;
    while (j < stream.size() && stream[j].t == stream[i].t) ++j;
    std::vector<FivegMeasurement> epoch(stream.begin() + i, stream.begin() + j);
    out.push_back(process_epoch(epoch, bss, gamma, h_ue, sigma2_h, em, anchor));
    i = j;
  }
  return out;
}

}  // namespace navfuse
