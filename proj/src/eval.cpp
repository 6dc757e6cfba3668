#include "navfuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace navfuse {

std::vector<ErrorSample> error_series(const std::vector<NavState>& estimates,
                                      const std::vector<TruthSample>& truth,
                                      const EarthModel& em) {
  if (truth.size() < 2) throw std::invalid_argument("need at least two truth samples");
  const Geodetic anchor = truth.front().nav.pos;
  std::vector<Vector3d> tru;
  tru.reserve(truth.size());
  for (const TruthSample& ts : truth) {
    tru.push_back(geodetic_to_enu(em, anchor, ts.nav.pos).vec());
  }

  std::vector<ErrorSample> out;
  std::size_t j = 0;
  for (const NavState& est : estimates) {
    if (est.t < truth.front().t - 1e-9 || est.t > truth.back().t + 1e-9) continue;
    while (j + 1 < truth.size() && truth[j + 1].t <= est.t + 1e-12) ++j;
    Vector3d ref = tru[j];
    if (j + 1 < truth.size() && truth[j + 1].t > truth[j].t) {
      const double u =
          std::clamp((est.t - truth[j].t) / (truth[j + 1].t - truth[j].t), 0.0, 1.0);
      ref = (1.0 - u) * tru[j] + u * tru[j + 1];
    }
    const Vector3d e = geodetic_to_enu(em, anchor, est.pos).vec() - ref;
    ErrorSample s;
    s.t = est.t;
    s.enu = e;
    s.horiz = std::hypot(e.x(), e.y());
    s.err3d = e.norm();
    out.push_back(s);
  }
  return out;
}

double two_sigma(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  if (idx == 0) idx = 1;
  if (idx > n) idx = n;
  return values[idx - 1];
}

double frac_below(const std::vector<double>& values, double threshold) {
  if (values.empty()) return 0.0;
  std::size_t c = 0;
  for (double v : values) {
    if (v <= threshold) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(values.size());
}

ErrorStats summarize(const std::vector<double>& errors) {
  ErrorStats st;
  st.count = errors.size();
  if (errors.empty()) return st;
  double sum = 0.0, sq = 0.0, mx = 0.0;
  for (double v : errors) {
    sum += v;
    sq += v * v;
    mx = std::max(mx, v);
  }
  st.mean = sum / static_cast<double>(errors.size());
  st.rms = std::sqrt(sq / static_cast<double>(errors.size()));
  st.max = mx;
  st.two_sigma = two_sigma(errors);
  st.frac_below_030 = frac_below(errors, 0.3);
  st.frac_below_100 = frac_below(errors, 1.0);
  st.frac_below_200 = frac_below(errors, 2.0);
  return st;
}

ErrorStats summarize_window(const std::vector<ErrorSample>& series, bool horizontal,
                            double t0, double t1) {
  std::vector<double> vals;
  for (const ErrorSample& s : series) {
    if (s.t < t0 - 1e-9 || s.t > t1 + 1e-9) continue;
    vals.push_back(horizontal ? s.horiz : s.err3d);
  }
  return summarize(vals);
}

std::vector<double> horizontal_errors(const std::vector<ErrorSample>& series) {
  std::vector<double> v;
  v.reserve(series.size());
  for (const ErrorSample& s : series) v.push_back(s.horiz);
  return v;
}

std::vector<double> errors_3d(const std::vector<ErrorSample>& series) {
  std::vector<double> v;
  v.reserve(series.size());
  for (const ErrorSample& s : series) v.push_back(s.err3d);
  return v;
}

std::vector<std::pair<double, double>> cdf_points(std::vector<double> values) {
  std::vector<std::pair<double, double>> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;  // keep last of a run
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

}  // namespace navfuse
