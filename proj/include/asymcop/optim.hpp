#pragma once

// Derivative-free simplex minimization (Nelder-Mead) for smooth,
// low-dimensional objectives.  Used on unconstrained reparametrizations of
// box-constrained likelihoods, so no bound handling is needed here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "asymcop/common.hpp"

namespace asymcop {

struct SimplexOptions {
  double initial_step = 0.25;  // displacement of each start-simplex vertex
  double f_abs_tol = 1e-10;    // stop when the value spread is below
  double f_rel_tol = 1e-12;    //   f_abs_tol + f_rel_tol * |best value|
  double x_tol = 1e-10;        // or the simplex diameter is below x_tol
  int max_evaluations = 4000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  int n_eval = 0;
};

// Minimizes f over R^dim starting from `start`.  The objective may throw;
// exceptions propagate to the caller with the evaluation abandoned.
template <typename F>
SimplexResult nelder_mead(F&& f, const std::vector<double>& start,
                          const SimplexOptions& opt = {}) {
  const std::size_t dim = start.size();
  if (dim == 0) throw domain_error("nelder_mead: empty start point");

  SimplexResult result;
  std::vector<std::vector<double>> xs(dim + 1, start);
  std::vector<double> fs(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= dim; ++i) {
    fs[i] = f(xs[i]);
    ++result.n_eval;
  }

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim);
  auto evaluate = [&](const std::vector<double>& x) {
    ++result.n_eval;
    return f(x);
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double spread = fs[worst] - fs[best];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t d = 0; d < dim; ++d)
        diameter = std::max(diameter, std::abs(xs[i][d] - xs[best][d]));
    if (spread <= opt.f_abs_tol + opt.f_rel_tol * std::abs(fs[best]) ||
        diameter <= opt.x_tol) {
      result.converged = true;
      break;
    }
    if (result.n_eval >= opt.max_evaluations) break;

    for (std::size_t d = 0; d < dim; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i <= dim; ++i)
        if (i != worst) s += xs[i][d];
      centroid[d] = s / static_cast<double>(dim);
    }

    auto blend = [&](double coef) {
      for (std::size_t d = 0; d < dim; ++d)
        trial[d] = centroid[d] + coef * (centroid[d] - xs[worst][d]);
    };

    blend(1.0);  // reflection
    double fr = evaluate(trial);
    if (fr < fs[best]) {
      std::vector<double> reflected = trial;
      blend(2.0);  // expansion
      double fe = evaluate(trial);
      if (fe < fr) {
        xs[worst] = trial;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second_worst]) {
      xs[worst] = trial;
      fs[worst] = fr;
      continue;
    }
    bool outside = fr < fs[worst];
    blend(outside ? 0.5 : -0.5);  // contraction toward the better side
    double fc = evaluate(trial);
    if ((outside && fc <= fr) || (!outside && fc < fs[worst])) {
      xs[worst] = trial;
      fs[worst] = fc;
      continue;
    }
    // Shrink everything toward the best vertex.
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d)
        xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
      fs[i] = evaluate(xs[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fs[i] < fs[best]) best = i;
  result.x = xs[best];
  result.value = fs[best];
  return result;
}

}  // namespace asymcop
