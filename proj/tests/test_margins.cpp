#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "asymcop/margins.hpp"
#include "asymcop/rng.hpp"
#include "asymcop/stats.hpp"

using asymcop::MarginModel;
using asymcop::Rng;
using Catch::Approx;

namespace {

// Body uniform on (0, x0), tail x0 + sigma * (1 - U^k) / k: exact draws from
// the semi-parametric law the fitter assumes.
std::vector<double> synthetic_sample(std::size_t n_body, std::size_t n_tail,
                                     double x0, double sigma, double k,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> data;
  data.reserve(n_body + n_tail);
  for (std::size_t i = 0; i < n_body; ++i)
    data.push_back(rng.uniform(0.0, x0));
  for (std::size_t i = 0; i < n_tail; ++i) {
    double u = rng.uniform();
    data.push_back(x0 + sigma * (1.0 - std::pow(u, k)) / k);
  }
  return data;
}

}  // namespace

TEST_CASE("moment estimators recover a synthetic generalized pareto tail") {
  const double sigma = 1.07, k = -0.07, x0 = 6.10;
  auto data = synthetic_sample(36000, 4000, x0, sigma, k, 2024);
  auto m = asymcop::fit_margin(data, 0.9);

  CHECK(m.gpd_scale == Approx(sigma).margin(0.05));
  CHECK(m.gpd_shape == Approx(k).margin(0.03));
  CHECK(m.threshold == Approx(x0).margin(0.005));
  CHECK(m.percentile == Approx(36000.0 / 40001.0).margin(1e-12));
  CHECK(m.sorted_sample.size() == 40000);
  CHECK(std::is_sorted(m.sorted_sample.begin(), m.sorted_sample.end()));
}

TEST_CASE("threshold sits at the requested quantile and the cdf is continuous there") {
  auto data = synthetic_sample(1800, 200, 3.0, 0.8, 0.1, 7);
  auto m = asymcop::fit_margin(data, 0.9);

  std::vector<double> sorted = data;
  std::sort(sorted.begin(), sorted.end());
  CHECK(m.threshold == sorted[1799]);
  CHECK(m.percentile == Approx(1800.0 / 2001.0).margin(1e-15));

  // Both branches agree at the threshold itself.
  CHECK(asymcop::margin_cdf(m, m.threshold) ==
        Approx(m.percentile).margin(1e-12));
  double above = asymcop::margin_cdf(m, m.threshold + 1e-9);
  CHECK(above >= m.percentile - 1e-15);
  CHECK(above - m.percentile < 1e-6);
}

TEST_CASE("cdf is nondecreasing across the threshold crossover and clipped") {
  auto data = synthetic_sample(900, 100, 2.0, 0.5, -0.2, 11);
  auto m = asymcop::fit_margin(data, 0.9);

  double lo = -1.0, hi = m.sorted_sample.back() + 5.0 * m.gpd_scale;
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double x = lo + (hi - lo) * i / 400.0;
    double p = asymcop::margin_cdf(m, x);
    CHECK(p >= 1e-12);
    CHECK(p <= 1.0 - 1e-12);
    if (i > 0) CHECK(p >= prev - 1e-15);
    prev = p;
  }
  // Below the sample and far above it the clip bounds are reached.
  CHECK(asymcop::margin_cdf(m, -100.0) == 1e-12);
  CHECK(asymcop::margin_cdf(m, 1e10) == 1.0 - 1e-12);
}

TEST_CASE("cdf and quantile invert each other on both sides of the threshold") {
  auto data = synthetic_sample(4500, 500, 4.0, 1.2, -0.1, 13);
  auto m = asymcop::fit_margin(data, 0.9);
  const double n = static_cast<double>(m.sorted_sample.size());

  for (int i = 1; i <= 199; ++i) {
    double p = i / 200.0;
    double x = asymcop::margin_quantile(m, p);
    double back = asymcop::margin_cdf(m, x);
    if (p <= m.percentile) {
      CHECK(back == Approx(p).margin(1.0 / n));
      CHECK(back >= p - 1e-12);  // empirical inverse rounds upward
    } else {
      CHECK(back == Approx(p).margin(1e-10));
    }
  }
  // quantile(cdf(x)) returns x itself above the threshold.
  for (double x : {m.threshold + 0.05, m.threshold + 0.7, m.threshold + 3.1}) {
    double p = asymcop::margin_cdf(m, x);
    CHECK(asymcop::margin_quantile(m, p) == Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("median of the fitted exceedance law maps to the midpoint percentile") {
  auto data = synthetic_sample(2700, 300, 5.0, 0.9, -0.15, 17);
  auto m = asymcop::fit_margin(data, 0.9);

  double x_med =
      m.threshold +
      m.gpd_scale / m.gpd_shape * (1.0 - std::pow(0.5, m.gpd_shape));
  CHECK(asymcop::margin_cdf(m, x_med) ==
        Approx(m.percentile + 0.5 * (1.0 - m.percentile)).margin(1e-12));

  // Exponential limit of the tail law: same identity with sigma * log 2.
  MarginModel e = m;
  e.gpd_shape = 0.0;
  double x_med0 = e.threshold + e.gpd_scale * std::log(2.0);
  CHECK(asymcop::margin_cdf(e, x_med0) ==
        Approx(e.percentile + 0.5 * (1.0 - e.percentile)).margin(1e-12));
}

TEST_CASE("probability integral transform of the margin is uniform") {
  auto data = synthetic_sample(3600, 400, 6.1, 1.07, -0.07, 23);
  auto m = asymcop::fit_margin(data, 0.9);

  // Fresh draws from the fitted model.
  Rng rng(99);
  std::vector<double> pit;
  for (int i = 0; i < 2000; ++i) {
    double x = asymcop::margin_quantile(m, rng.uniform());
    pit.push_back(asymcop::margin_cdf(m, x));
  }
  CHECK(asymcop::ks_uniform_distance(pit) < 1.5 / std::sqrt(2000.0));

  // The training data itself.
  pit.clear();
  for (double x : data) pit.push_back(asymcop::margin_cdf(m, x));
  CHECK(asymcop::ks_uniform_distance(pit) <
        1.5 / std::sqrt(static_cast<double>(data.size())));
}

TEST_CASE("dithering is deterministic, bounded, and off by default") {
  // Integer-recorded data with heavy ties.
  Rng rng(31);
  std::vector<double> data;
  for (int i = 0; i < 2000; ++i) {
    double x = rng.uniform(0.0, 10.0);
    if (rng.uniform() < 0.9) x = std::floor(x);  // body coarsely recorded
    else x = 10.0 + rng.gamma(1.0);              // continuous tail
    data.push_back(std::floor(x * 2.0) / 2.0);   // half-unit recording grid
  }

  auto a = asymcop::fit_margin(data, 0.9, 0.25, 555);
  auto b = asymcop::fit_margin(data, 0.9, 0.25, 555);
  auto c = asymcop::fit_margin(data, 0.9, 0.25, 556);
  CHECK(a.sorted_sample == b.sorted_sample);
  CHECK(a.sorted_sample != c.sorted_sample);
  CHECK(a.gpd_scale == b.gpd_scale);

  // Dithered values stay on their recording cell.
  std::vector<double> recorded = data;
  std::sort(recorded.begin(), recorded.end());
  std::vector<double> snapped = a.sorted_sample;
  for (double& x : snapped) x = std::round(x * 2.0) / 2.0;
  std::sort(snapped.begin(), snapped.end());
  CHECK(snapped == recorded);

  // Zero halfwidth leaves the sample untouched.
  auto plain = asymcop::fit_margin(data, 0.9, 0.0, 555);
  CHECK(plain.sorted_sample == recorded);

  // Dithering breaks ties completely.
  CHECK(std::adjacent_find(a.sorted_sample.begin(), a.sorted_sample.end()) ==
        a.sorted_sample.end());
}

TEST_CASE("margin fitting rejects invalid inputs") {
  auto good = synthetic_sample(900, 100, 2.0, 1.0, 0.0, 41);

  std::vector<double> tiny(good.begin(), good.begin() + 99);
  CHECK_THROWS_AS(asymcop::fit_margin(tiny, 0.9), asymcop::domain_error);
  CHECK_THROWS_AS(asymcop::fit_margin(good, 0.5), asymcop::domain_error);
  CHECK_THROWS_AS(asymcop::fit_margin(good, 1.0), asymcop::domain_error);
  CHECK_THROWS_AS(asymcop::fit_margin(good, 0.9, -0.1), asymcop::domain_error);

  auto with_nan = good;
  with_nan[5] = std::nan("");
  CHECK_THROWS_AS(asymcop::fit_margin(with_nan, 0.9), asymcop::domain_error);

  // 100 points at quantile 0.75 leaves only 25 exceedances.
  std::vector<double> hundred(good.begin(), good.begin() + 100);
  CHECK_THROWS_AS(asymcop::fit_margin(hundred, 0.75), asymcop::domain_error);

  // Constant data: everything ties at the threshold, so no exceedances.
  std::vector<double> flat(200, 3.0);
  CHECK_THROWS_AS(asymcop::fit_margin(flat, 0.9), asymcop::domain_error);

  // Constant exceedances: moment estimation impossible.
  std::vector<double> degenerate;
  Rng rng(43);
  for (int i = 0; i < 900; ++i) degenerate.push_back(rng.uniform(0.0, 1.0));
  for (int i = 0; i < 100; ++i) degenerate.push_back(5.0);
  CHECK_THROWS_AS(asymcop::fit_margin(degenerate, 0.9),
                  asymcop::numeric_error);

  CHECK_THROWS_AS(asymcop::margin_cdf(MarginModel{}, std::nan("")),
                  asymcop::domain_error);
  CHECK_THROWS_AS(asymcop::margin_quantile(MarginModel{}, 1.5),
                  asymcop::domain_error);
}
