#pragma once

#include <utility>
#include <vector>

#include "navfuse/frames.hpp"
#include "navfuse/scenario.hpp"

namespace navfuse {

/// Position error of one estimate epoch against interpolated truth, ENU m.
struct ErrorSample {
  double t = 0.0;
  Vector3d enu = Vector3d::Zero();
  double horiz = 0.0;
  double err3d = 0.0;
};

/// Summary statistics of a scalar error series. two_sigma is the empirical
/// 95th percentile (sorted index ceil(0.95 n), 1-based).
struct ErrorStats {
  std::size_t count = 0;
  double mean = 0.0;
  double rms = 0.0;
  double max = 0.0;
  double two_sigma = 0.0;
  double frac_below_030 = 0.0;
  double frac_below_100 = 0.0;
  double frac_below_200 = 0.0;
};

/// Estimate-vs-truth position errors at every estimate epoch inside the truth
/// time span. Truth is interpolated linearly in the ENU frame anchored at its
/// first sample.
std::vector<ErrorSample> error_series(const std::vector<NavState>& estimates,
                                      const std::vector<TruthSample>& truth,
                                      const EarthModel& em = {});

ErrorStats summarize(const std::vector<double>& errors);

/// Stats over [t0, t1] of either the horizontal or the 3D error series.
ErrorStats summarize_window(const std::vector<ErrorSample>& series, bool horizontal,
                            double t0, double t1);

/// Scalar series extraction helpers.
std::vector<double> horizontal_errors(const std::vector<ErrorSample>& series);
std::vector<double> errors_3d(const std::vector<ErrorSample>& series);

/// Empirical CDF: one (value, fraction at or below) point per unique value.
std::vector<std::pair<double, double>> cdf_points(std::vector<double> values);

/// Fraction of values at or below the threshold.
double frac_below(const std::vector<double>& values, double threshold);

/// Empirical 95th percentile of the series (the 2-sigma figure of merit).
double two_sigma(std::vector<double> values);

}  // namespace navfuse
