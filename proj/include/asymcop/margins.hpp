#pragma once

// Semi-parametric margin model: empirical distribution below a high
// threshold, generalized Pareto tail above it.  The shape parameter k
// follows the "bounded tail for k > 0" sign convention, i.e. the tail
// survivor function above the threshold x0 is
//
//   S(x) = (1 - k (x - x0) / sigma)_+^{1/k}          (k != 0)
//        = exp(-(x - x0) / sigma)                    (k -> 0)
//
// and the full cdf is F(x) = 1 - (1 - u0) S(x) for x > x0, with the
// empirical cdf rescaled onto [0, u0] below.  Tail parameters are fitted
// by the method of moments on threshold exceedances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "asymcop/common.hpp"
#include "asymcop/rng.hpp"

namespace asymcop {

struct MarginModel {
  double threshold = 0.0;    // x0, in data units
  double percentile = 0.0;   // u0 = F(x0)
  double gpd_scale = 1.0;    // sigma > 0
  double gpd_shape = 0.0;    // k; k > 0 means a bounded upper tail
  std::vector<double> sorted_sample;  // nondecreasing training sample
};

namespace detail {

// Survivor function of the tail law at standardized excess z = (x-x0)/sigma.
inline double gpd_survivor(double z, double k) {
  if (z <= 0.0) return 1.0;
  if (std::abs(k) < 1e-12) return std::exp(-z);
  double base = 1.0 - k * z;
  if (base <= 0.0) return 0.0;  // beyond the bounded-tail endpoint (k > 0)
  return std::pow(base, 1.0 / k);
}

// Inverse of gpd_survivor: the standardized excess with survivor value w.
inline double gpd_survivor_inverse(double w, double k) {
  if (std::abs(k) < 1e-12) return -std::log(w);
  return (1.0 - std::pow(w, k)) / k;
}

// Number of sample points <= x.
inline std::size_t rank_at(const std::vector<double>& sorted, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

}  // namespace detail

// Distribution function of the fitted margin, clipped away from {0, 1} so
// the result is always usable as a copula coordinate.
inline double margin_cdf(const MarginModel& m, double x) {
  if (!std::isfinite(x)) throw domain_error("margin_cdf: x must be finite");
  double p;
  if (x <= m.threshold) {
    std::size_t n0 = detail::rank_at(m.sorted_sample, m.threshold);
    p = (n0 == 0) ? 0.0
                  : m.percentile *
                        static_cast<double>(detail::rank_at(m.sorted_sample, x)) /
                        static_cast<double>(n0);
  } else {
    double z = (x - m.threshold) / m.gpd_scale;
    p = 1.0 - (1.0 - m.percentile) * detail::gpd_survivor(z, m.gpd_shape);
  }
  return std::min(std::max(p, kUnitEps), 1.0 - kUnitEps);
}

// Inverse of margin_cdf: empirical quantile below the threshold percentile,
// closed-form generalized Pareto inverse above it.
inline double margin_quantile(const MarginModel& m, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw domain_error("margin_quantile: p must lie in [0, 1]");
  p = std::min(std::max(p, kUnitEps), 1.0 - kUnitEps);
  if (p <= m.percentile) {
    std::size_t n0 = detail::rank_at(m.sorted_sample, m.threshold);
    if (n0 == 0) return m.threshold;
    double target = p * static_cast<double>(n0) / m.percentile;
    auto i = static_cast<std::size_t>(std::ceil(target - 1e-12));
    i = std::min(std::max<std::size_t>(i, 1), n0);
    return m.sorted_sample[i - 1];
  }
  double w = (1.0 - p) / (1.0 - m.percentile);
  return m.threshold + m.gpd_scale * detail::gpd_survivor_inverse(w, m.gpd_shape);
}

// Fits the semi-parametric margin.  The threshold is placed at the requested
// empirical quantile; (sigma, k) come from the method of moments on the
// exceedances: with mean mu and variance s2 of (x - x0),
//   sigma = (mu/2)(mu^2/s2 + 1),   k = (mu^2/s2 - 1)/2.
// A positive dither halfwidth adds uniform noise on [-w, +w] before fitting,
// which removes ties in coarsely recorded (e.g. integer) data; the noise is
// drawn deterministically from `seed`.
inline MarginModel fit_margin(std::vector<double> data,
                              double threshold_quantile = 0.9,
                              double dither_halfwidth = 0.0,
                              std::uint64_t seed = 0) {
  const std::size_t n = data.size();
  if (n < 100)
    throw domain_error("fit_margin: need at least 100 observations, got " +
                       std::to_string(n));
  if (!(threshold_quantile > 0.5 && threshold_quantile < 1.0))
    throw domain_error("fit_margin: threshold_quantile must lie in (0.5, 1)");
  if (!(dither_halfwidth >= 0.0) || !std::isfinite(dither_halfwidth))
    throw domain_error("fit_margin: dither_halfwidth must be >= 0");
  for (double x : data)
    if (!std::isfinite(x))
      throw domain_error("fit_margin: data must be finite");

  if (dither_halfwidth > 0.0) {
    Rng rng(seed);
    for (double& x : data)
      x += rng.uniform(-dither_halfwidth, dither_halfwidth);
  }
  std::sort(data.begin(), data.end());

  auto nq = static_cast<std::size_t>(
      std::ceil(threshold_quantile * static_cast<double>(n) - 1e-9));
  nq = std::min(std::max<std::size_t>(nq, 1), n);
  const double x0 = data[nq - 1];
  // Recount so ties at the threshold stay on the empirical side.
  const std::size_t n0 = detail::rank_at(data, x0);
  const std::size_t n_exc = n - n0;
  if (n_exc < 30)
    throw domain_error("fit_margin: need at least 30 exceedances, got " +
                       std::to_string(n_exc));

  double mean = 0.0;
  for (std::size_t i = n0; i < n; ++i) mean += data[i] - x0;
  mean /= static_cast<double>(n_exc);
  double s2 = 0.0;
  for (std::size_t i = n0; i < n; ++i) {
    double d = (data[i] - x0) - mean;
    s2 += d * d;
  }
  s2 /= static_cast<double>(n_exc - 1);
  // Relative test: rounding can leave a nonzero ulp-scale s2 even for
  // constant exceedances, while genuine tail data has s2 of order mean^2.
  if (!(s2 > mean * mean * 1e-10) || !std::isfinite(s2))
    throw numeric_error("fit_margin: exceedances have zero variance");

  const double ratio = mean * mean / s2;
  MarginModel m;
  m.threshold = x0;
  m.percentile = static_cast<double>(n0) / (static_cast<double>(n) + 1.0);
  m.gpd_scale = 0.5 * mean * (ratio + 1.0);
  m.gpd_shape = 0.5 * (ratio - 1.0);
  m.sorted_sample = std::move(data);
  return m;
}

}  // namespace asymcop
