#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "navfuse/eval.hpp"

using namespace navfuse;

namespace {

const Geodetic kAnchor{0.7618362184955249, -1.3864895577842953, 100.0};

TruthSample truth_at(const EarthModel& em, double t, double e, double n, double u) {
  TruthSample ts;
  ts.t = t;
  ts.nav.t = t;
  ts.nav.pos = enu_to_geodetic(em, kAnchor, LocalEnu{e, n, u});
  return ts;
}

NavState estimate_at(const EarthModel& em, double t, double e, double n, double u) {
  NavState s;
  s.t = t;
  s.pos = enu_to_geodetic(em, kAnchor, LocalEnu{e, n, u});
  return s;
}

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("95th percentile picks the documented order statistic") {
  // 1..100: index ceil(95) = 95 (1-based) -> value 95
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(static_cast<double>(i));
  std::shuffle(v.begin(), v.end(), std::mt19937_64(7));
  CHECK(two_sigma(v) == 95.0);

  // 1..20: ceil(19) = 19 -> value 19
  std::vector<double> w;
  for (int i = 1; i <= 20; ++i) w.push_back(static_cast<double>(i));
  std::shuffle(w.begin(), w.end(), std::mt19937_64(8));
  CHECK(two_sigma(w) == 19.0);

  // 1..99: ceil(94.05) = 95 -> value 95
  std::vector<double> x;
  for (int i = 1; i <= 99; ++i) x.push_back(static_cast<double>(i));
  CHECK(two_sigma(x) == 95.0);

  CHECK(two_sigma({3.25}) == 3.25);
  CHECK(two_sigma({}) == 0.0);
}

TEST_CASE("the percentile is the smallest sample with CDF at or above 0.95") {
  for (std::size_t n : {20u, 97u, 1000u, 12345u}) {
    std::vector<double> v = random_values(n, 1234 + static_cast<unsigned>(n));
    const double ts = two_sigma(v);
    const double f = frac_below(v, ts);
    // sandwich: 0.95 <= CDF(two_sigma) <= 0.95 + 1/n (continuous draws, no ties)
    CHECK(f >= 0.95 - 1e-12);
    CHECK(f <= 0.95 + 1.0 / static_cast<double>(n) + 1e-12);
    // minimality: the next-smaller sample value sits strictly below 0.95
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), ts);
    REQUIRE(it != sorted.begin());
    const double prev = *(it - 1) == ts && it - 1 != sorted.begin() ? *(it - 2) : *(it - 1);
    if (prev < ts) CHECK(frac_below(v, prev) < 0.95);
  }
}

TEST_CASE("ties do not break the percentile definition") {
  std::vector<double> v(50, 2.5);  // all equal
  CHECK(two_sigma(v) == 2.5);
  CHECK(frac_below(v, 2.5) == 1.0);
  CHECK(frac_below(v, 2.4999) == 0.0);
}

TEST_CASE("fraction-below counts the boundary as inside") {
  const std::vector<double> v{0.3, 0.4};
  CHECK(frac_below(v, 0.3) == 0.5);
  CHECK(frac_below(v, 0.29999999) == 0.0);
  CHECK(frac_below(v, 0.4) == 1.0);
  CHECK(frac_below({}, 1.0) == 0.0);
}

TEST_CASE("summary statistics match a brute-force recomputation on 1e5 draws") {
  std::mt19937_64 rng(20260822);
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::size_t n = 100000;
  std::vector<double> v(n);
  for (double& x : v) x = std::abs(n01(rng));

  const ErrorStats st = summarize(v);
  CHECK(st.count == n);

  long double sum = 0.0L, sq = 0.0L;
  double mx = 0.0;
  std::size_t c03 = 0, c10 = 0, c20 = 0;
  for (double x : v) {
    sum += x;
    sq += static_cast<long double>(x) * x;
    mx = std::max(mx, x);
    if (x <= 0.3) ++c03;
    if (x <= 1.0) ++c10;
    if (x <= 2.0) ++c20;
  }
  const double mean = static_cast<double>(sum / n);
  const double rms = std::sqrt(static_cast<double>(sq / n));
  CHECK(std::abs(st.mean - mean) < 1e-9 * mean);
  CHECK(std::abs(st.rms - rms) < 1e-9 * rms);
  CHECK(st.max == mx);
  CHECK(st.frac_below_030 == static_cast<double>(c03) / static_cast<double>(n));
  CHECK(st.frac_below_100 == static_cast<double>(c10) / static_cast<double>(n));
  CHECK(st.frac_below_200 == static_cast<double>(c20) / static_cast<double>(n));

  // independent order-statistic computation of the 95th percentile
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  CHECK(st.two_sigma == sorted[idx - 1]);

  // internal consistency: rms dominates mean, max dominates the percentile
  CHECK(st.rms >= st.mean);
  CHECK(st.max >= st.two_sigma);
}

TEST_CASE("summary of an empty series is all zeros") {
  const ErrorStats st = summarize({});
  CHECK(st.count == 0);
  CHECK(st.mean == 0.0);
  CHECK(st.rms == 0.0);
  CHECK(st.max == 0.0);
  CHECK(st.two_sigma == 0.0);
  CHECK(st.frac_below_030 == 0.0);
}

TEST_CASE("empirical CDF keeps one point per unique value with tie runs collapsed") {
  const auto pts = cdf_points({2.0, 1.0, 1.0, 3.0});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].first == 1.0);
  CHECK(pts[0].second == 0.5);
  CHECK(pts[1].first == 2.0);
  CHECK(pts[1].second == 0.75);
  CHECK(pts[2].first == 3.0);
  CHECK(pts[2].second == 1.0);
  CHECK(cdf_points({}).empty());
}

TEST_CASE("empirical CDF is monotone and consistent with fraction-below") {
  const std::vector<double> v = random_values(5000, 99);
  const auto pts = cdf_points(v);
  REQUIRE(!pts.empty());
  CHECK(pts.back().second == 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      CHECK(pts[i].first > pts[i - 1].first);
      CHECK(pts[i].second > pts[i - 1].second);
    }
    // each point reports exactly the fraction of samples at or below its value
    CHECK(pts[i].second == frac_below(v, pts[i].first));
  }
}

TEST_CASE("error series vanishes when estimates ride the truth exactly") {
  const EarthModel em;
  std::vector<TruthSample> truth{truth_at(em, 0.0, 0.0, 0.0, 0.0),
                                 truth_at(em, 1.0, 10.0, 0.0, 0.0),
                                 truth_at(em, 2.0, 10.0, 20.0, 0.0)};
  std::vector<NavState> est{estimate_at(em, 0.0, 0.0, 0.0, 0.0),
                            estimate_at(em, 0.5, 5.0, 0.0, 0.0),
                            estimate_at(em, 1.5, 10.0, 10.0, 0.0),
                            estimate_at(em, 2.0, 10.0, 20.0, 0.0)};
  const auto series = error_series(est, truth, em);
  REQUIRE(series.size() == 4);
  for (const ErrorSample& s : series) {
    CHECK(s.err3d < 1e-6);
    CHECK(s.horiz <= s.err3d);
  }
  CHECK(series[1].t == 0.5);
}

TEST_CASE("error series reports a known offset in all three channels") {
  const EarthModel em;
  std::vector<TruthSample> truth{truth_at(em, 0.0, 0.0, 0.0, 0.0),
                                 truth_at(em, 1.0, 10.0, 0.0, 0.0)};
  // truth at t = 0.5 is (5, 0, 0); the estimate sits at (5, 3, -4)
  std::vector<NavState> est{estimate_at(em, 0.5, 5.0, 3.0, -4.0)};
  const auto series = error_series(est, truth, em);
  REQUIRE(series.size() == 1);
  CHECK(std::abs(series[0].enu.x() - 0.0) < 1e-6);
  CHECK(std::abs(series[0].enu.y() - 3.0) < 1e-6);
  CHECK(std::abs(series[0].enu.z() - (-4.0)) < 1e-6);
  CHECK(std::abs(series[0].horiz - 3.0) < 1e-6);
  CHECK(std::abs(series[0].err3d - 5.0) < 1e-6);
}

TEST_CASE("estimates outside the truth span are dropped") {
  const EarthModel em;
  std::vector<TruthSample> truth{truth_at(em, 1.0, 0.0, 0.0, 0.0),
                                 truth_at(em, 2.0, 10.0, 0.0, 0.0)};
  std::vector<NavState> est{estimate_at(em, 0.2, 0.0, 0.0, 0.0),
                            estimate_at(em, 1.5, 5.0, 0.0, 0.0),
                            estimate_at(em, 2.7, 10.0, 0.0, 0.0)};
  const auto series = error_series(est, truth, em);
  REQUIRE(series.size() == 1);
  CHECK(series[0].t == 1.5);
}

TEST_CASE("error series needs at least two truth samples") {
  const EarthModel em;
  std::vector<TruthSample> one{truth_at(em, 0.0, 0.0, 0.0, 0.0)};
  std::vector<NavState> est{estimate_at(em, 0.0, 0.0, 0.0, 0.0)};
  CHECK_THROWS_AS((void)error_series(est, one, em), std::invalid_argument);
  CHECK_THROWS_AS((void)error_series(est, {}, em), std::invalid_argument);
}

TEST_CASE("windowed summary keeps only epochs inside the interval, boundaries included") {
  std::vector<ErrorSample> series;
  for (int i = 0; i <= 10; ++i) {
    ErrorSample s;
    s.t = static_cast<double>(i);
    s.horiz = static_cast<double>(i);
    s.err3d = 2.0 * static_cast<double>(i);
    series.push_back(s);
  }
  const ErrorStats h = summarize_window(series, true, 3.0, 7.0);
  CHECK(h.count == 5);
  CHECK(h.mean == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(h.max == 7.0);
  const ErrorStats d3 = summarize_window(series, false, 3.0, 7.0);
  CHECK(d3.count == 5);
  CHECK(d3.max == 14.0);
  const ErrorStats none = summarize_window(series, true, 20.0, 30.0);
  CHECK(none.count == 0);
}

TEST_CASE("scalar extraction helpers mirror the per-sample fields") {
  std::vector<ErrorSample> series(3);
  series[0].horiz = 1.0;
  series[0].err3d = 1.5;
  series[1].horiz = 2.0;
  series[1].err3d = 2.5;
  series[2].horiz = 0.25;
  series[2].err3d = 0.75;
  const auto h = horizontal_errors(series);
  const auto d = errors_3d(series);
  REQUIRE(h.size() == 3);
  REQUIRE(d.size() == 3);
  CHECK(h[0] == 1.0);
  CHECK(h[2] == 0.25);
  CHECK(d[1] == 2.5);
  CHECK(d[2] == 0.75);
}
