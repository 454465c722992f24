#pragma once

// Independent numerical oracles used to validate analytic implementations:
// finite differences of the cdf for densities and conditionals, Monte Carlo
// integration for density normalization, and grid checks for the copula
// axioms. These deliberately avoid the analytic code paths they test.

#include <cmath>
#include <vector>

#include "asymcop/copula.hpp"
#include "asymcop/rng.hpp"

namespace oracle {

// Mixed second difference of the cdf, an independent density estimate.
inline double fd_density(const asymcop::Copula& c, double u, double v,
                         double h = 1e-4) {
  return (c.cdf(u + h, v + h) - c.cdf(u + h, v - h) - c.cdf(u - h, v + h) +
          c.cdf(u - h, v - h)) /
         (4.0 * h * h);
}

// Central difference of the cdf in the first argument.
inline double fd_partial_u(const asymcop::Copula& c, double u, double v,
                           double h = 1e-6) {
  return (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h);
}

inline double fd_partial_v(const asymcop::Copula& c, double u, double v,
                           double h = 1e-6) {
  return (c.cdf(u, v + h) - c.cdf(u, v - h)) / (2.0 * h);
}

// Monte Carlo estimate of the density integral over the unit square; should
// be 1 for a valid copula density.
inline double mc_density_mass(const asymcop::Copula& c, int n,
                              std::uint64_t seed) {
  asymcop::Rng rng(seed);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += c.density(rng.uniform(), rng.uniform());
  return sum / n;
}

// Largest violation of 2-increasingness over an m x m grid: every rectangle
// volume C(u2,v2) - C(u1,v2) - C(u2,v1) + C(u1,v1) must be >= 0.
inline double worst_rectangle_volume(const asymcop::Copula& c, int m = 50) {
  std::vector<std::vector<double>> g(m + 1, std::vector<double>(m + 1));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      g[i][j] = c.cdf(double(i) / m, double(j) / m);
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double vol = g[i + 1][j + 1] - g[i][j + 1] - g[i + 1][j] + g[i][j];
      if (vol < worst) worst = vol;
    }
  return worst;
}

// Largest deviation from the uniform-margin conditions C(u,1) = u and
// C(1,v) = v over a k-point interior grid.
inline double worst_margin_error(const asymcop::Copula& c, int k = 19) {
  double worst = 0.0;
  for (int i = 1; i <= k; ++i) {
    double u = double(i) / (k + 1);
    worst = std::max(worst, std::fabs(c.cdf(u, 1.0) - u));
    worst = std::max(worst, std::fabs(c.cdf(1.0, u) - u));
    worst = std::max(worst, std::fabs(c.cdf(u, 0.0)));
    worst = std::max(worst, std::fabs(c.cdf(0.0, u)));
  }
  return worst;
}

}  // namespace oracle
