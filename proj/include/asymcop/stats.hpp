#pragma once

// Rank statistics used across sampling and inference: Kendall's tau in
// O(n log n), one-sample Kolmogorov distance against the uniform law, and the
// grid sup-distance between an empirical copula and an analytic cdf.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "asymcop/common.hpp"
#include "asymcop/copula.hpp"

namespace asymcop {

namespace detail {

// Counts inversions of `values` by merge sort.
inline std::uint64_t merge_count(std::vector<double>& values,
                                 std::vector<double>& scratch,
                                 std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(values, scratch, lo, mid) +
                        merge_count(values, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      count += mid - i;
      scratch[k++] = values[j++];
    } else {
      scratch[k++] = values[i++];
    }
  }
  while (i < mid) scratch[k++] = values[i++];
  while (j < hi) scratch[k++] = values[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return count;
}

}  // namespace detail

// Kendall's tau for continuous data: sorts by the first coordinate and
// counts discordant pairs as inversions of the second. Ties (probability
// zero for continuous samples) are broken ascending and counted as
// concordant.
inline double kendall_tau(const std::vector<std::pair<double, double>>& pairs) {
  std::size_t n = pairs.size();
  if (n < 2) throw domain_error("kendall_tau: need at least two pairs");
  std::vector<std::pair<double, double>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> second(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) second[i] = sorted[i].second;
  std::uint64_t inversions = detail::merge_count(second, scratch, 0, n);
  double total = 0.5 * double(n) * double(n - 1);
  return 1.0 - 2.0 * double(inversions) / total;
}

// sup_x |F_n(x) - x| against the uniform law on (0,1).
inline double ks_uniform_distance(std::vector<double> values) {
  std::size_t n = values.size();
  if (n == 0) throw domain_error("ks_uniform_distance: empty sample");
  std::sort(values.begin(), values.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max(d, std::fabs(double(i + 1) / double(n) - values[i]));
    d = std::max(d, std::fabs(values[i] - double(i) / double(n)));
  }
  return d;
}

// sup over an m x m interior grid (u_i = i/(m+1)) of the distance between
// the empirical copula of `pairs` and the model cdf.
inline double grid_sup_distance(
    const std::vector<std::pair<double, double>>& pairs, const Copula& model,
    int m = 10) {
  if (pairs.empty()) throw domain_error("grid_sup_distance: empty sample");
  if (m < 1) throw domain_error("grid_sup_distance: grid size must be >= 1");
  double n = double(pairs.size());
  double worst = 0.0;
  for (int i = 1; i <= m; ++i) {
    double u = double(i) / double(m + 1);
    for (int j = 1; j <= m; ++j) {
      double v = double(j) / double(m + 1);
      std::size_t count = 0;
      for (const auto& [x, y] : pairs) {
        count += (x <= u && y <= v) ? 1 : 0;
      }
      worst = std::max(worst, std::fabs(double(count) / n - model.cdf(u, v)));
    }
  }
  return worst;
}

}  // namespace asymcop
