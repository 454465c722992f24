#pragma once

// Two-stage estimation: margins are fitted first (margins.hpp), data are
// mapped to pseudo-observations on the unit square, and copula parameters
// are then estimated by maximum likelihood over a nested model ladder
//   level 1: base family (Plackett, Gumbel, or Clayton-survival)
//   level 2: + Khoudraji asymmetrization (1 or 2 extra parameters)
//   level 3: + Gamma-frailty mixture (1 extra parameter)
// with standard errors from the observed information, BIC, nested
// likelihood-ratio tests, and delta-method tail-index uncertainty.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "asymcop/common.hpp"
#include "asymcop/construct.hpp"
#include "asymcop/copula.hpp"
#include "asymcop/margins.hpp"
#include "asymcop/optim.hpp"
#include "asymcop/sample.hpp"
#include "asymcop/tails.hpp"

namespace asymcop {

// Which coordinate carries a free asymmetry exponent at ladder level >= 2.
enum class AsymSide { First, Second, Both };

inline const char* asym_side_name(AsymSide s) {
  switch (s) {
    case AsymSide::First: return "first";
    case AsymSide::Second: return "second";
    case AsymSide::Both: return "both";
  }
  return "unknown";
}

struct ModelSpec {
  Family family = Family::Plackett;  // Plackett, Gumbel, or ClaytonSurvival
  int level = 1;                     // 1 base, 2 +asymmetry, 3 +frailty
  AsymSide side = AsymSide::Second;

  void validate() const {
    if (family != Family::Plackett && family != Family::Gumbel &&
        family != Family::ClaytonSurvival)
      throw domain_error(
          "ModelSpec: family must be plackett, gumbel, or clayton_survival");
    if (level < 1 || level > 3)
      throw domain_error("ModelSpec: level must be 1, 2, or 3");
  }

  bool has_theta() const {
    return level >= 2 && (side == AsymSide::First || side == AsymSide::Both);
  }
  bool has_delta() const {
    return level >= 2 && (side == AsymSide::Second || side == AsymSide::Both);
  }
  bool has_beta() const { return level >= 3; }

  std::vector<std::string> param_names() const {
    std::vector<std::string> names = {"alpha"};
    if (has_theta()) names.push_back("theta");
    if (has_delta()) names.push_back("delta");
    if (has_beta()) names.push_back("beta");
    return names;
  }

  std::size_t param_count() const {
    return 1 + (has_theta() ? 1 : 0) + (has_delta() ? 1 : 0) +
           (has_beta() ? 1 : 0);
  }

  Copula build(const std::vector<double>& p) const {
    validate();
    if (p.size() != param_count())
      throw domain_error("ModelSpec::build: expected " +
                         std::to_string(param_count()) + " parameters, got " +
                         std::to_string(p.size()));
    double alpha = p[0];
    std::size_t i = 1;
    double theta = has_theta() ? p[i++] : 1.0;
    double delta = has_delta() ? p[i++] : 1.0;
    Copula c = Copula::independence();
    switch (family) {
      case Family::Plackett:
        c = Copula::plackett(alpha);
        if (level >= 2) c = asymmetrize(c, theta, delta);
        break;
      case Family::Gumbel:
        c = Copula::gumbel(alpha);
        if (level >= 2) c = asymmetrize(c, theta, delta);
        break;
      default:
        // The Clayton-survival ladder asymmetrizes in survival scale so the
        // upper-tail mechanism stays intact under the Khoudraji transform.
        c = (level >= 2) ? asymmetrize_survival_clayton(alpha, theta, delta)
                         : Copula::clayton_survival(alpha);
        break;
    }
    if (level >= 3) c = frailty_mix(c, p[i]);
    return c;
  }

  std::string label() const {
    std::string s = family_name(family);
    if (level >= 2) s += std::string("+asym(") + asym_side_name(side) + ")";
    if (level >= 3) s += "+frailty";
    return s;
  }

  // Returns the next model down the ladder (used for degenerate fallbacks).
  ModelSpec restricted_spec() const {
    ModelSpec r = *this;
    r.level = level - 1;
    return r;
  }

  // True when `r`'s parameter set is a subset of this model's on the same
  // family (the restricted model is obtained by pinning transform parameters
  // at their identity values).
  bool nests(const ModelSpec& r) const {
    if (family != r.family) return false;
    if (r.level > level) return false;
    if (r.level >= 2 && r.side != side && side != AsymSide::Both) return false;
    return true;
  }

  bool operator==(const ModelSpec& o) const {
    return family == o.family && level == o.level &&
           (level < 2 || side == o.side);
  }
};

struct LrTest {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

struct TailEstimate {
  double lambda = 0.0;
  double std_error = 0.0;
};

struct FitResult {
  ModelSpec spec;
  std::vector<std::string> param_names;
  std::vector<double> params;  // original (box) space, ordered as param_names
  double loglik = -std::numeric_limits<double>::infinity();
  double bic_value = std::numeric_limits<double>::infinity();
  // Per-parameter standard errors; entries are empty when unavailable (no
  // positive-definite information matrix, or a boundary parameter).
  std::vector<std::optional<double>> stderrs;
  // Second derivatives of the log-likelihood at the optimum, original space;
  // empty when not computed (degenerate fits or evaluation failure).
  std::vector<std::vector<double>> hessian;
  bool converged = false;
  bool degenerate = false;  // some parameter within 1e-3 of a box edge
  int n_eval = 0;
  std::size_t n_obs = 0;
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Pseudo-observations and the copula log-likelihood.

inline SampleSet pseudo_observations(
    const std::vector<std::pair<double, double>>& data, const MarginModel& m1,
    const MarginModel& m2) {
  SampleSet s;
  s.model_tag = "pseudo_observations";
  s.pairs.reserve(data.size());
  for (const auto& [x, y] : data)
    s.pairs.emplace_back(margin_cdf(m1, x), margin_cdf(m2, y));
  return s;
}

inline double copula_loglik(const std::vector<std::pair<double, double>>& uv,
                            const Copula& c) {
  double s = 0.0;
  for (const auto& [u, v] : uv)
    s += std::log(std::max(c.density(u, v), 1e-300));
  return s;
}

inline double bic(double loglik, std::size_t param_count, std::size_t n_obs) {
  if (n_obs < 2) throw domain_error("bic: need at least 2 observations");
  return -2.0 * loglik +
         static_cast<double>(param_count) * std::log(static_cast<double>(n_obs));
}

// ---------------------------------------------------------------------------
// Box-constraint handling: every parameter optimizes in an unconstrained
// coordinate (log for positive, shifted log for lower-bounded, logit for
// unit-interval parameters).

namespace detail {

enum class Scale { LogShifted, Logit };

struct ParamBox {
  std::string name;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  Scale scale = Scale::LogShifted;
};

inline std::vector<ParamBox> boxes_for(const ModelSpec& spec) {
  std::vector<ParamBox> boxes;
  switch (spec.family) {
    case Family::Plackett:
      boxes.push_back({"alpha", -1.0,
                       std::numeric_limits<double>::infinity(),
                       Scale::LogShifted});
      break;
    case Family::Gumbel:
      boxes.push_back({"alpha", 0.0, 1.0, Scale::Logit});
      break;
    default:
      boxes.push_back({"alpha", 0.0,
                       std::numeric_limits<double>::infinity(),
                       Scale::LogShifted});
      break;
  }
  if (spec.has_theta()) boxes.push_back({"theta", 0.0, 1.0, Scale::Logit});
  if (spec.has_delta()) boxes.push_back({"delta", 0.0, 1.0, Scale::Logit});
  if (spec.has_beta())
    boxes.push_back({"beta", 0.0, std::numeric_limits<double>::infinity(),
                     Scale::LogShifted});
  return boxes;
}

inline double to_unconstrained(const ParamBox& b, double p) {
  if (b.scale == Scale::Logit) {
    double span = b.hi - b.lo;
    double z = std::clamp((p - b.lo) / span, 1e-9, 1.0 - 1e-9);
    return std::log(z / (1.0 - z));
  }
  return std::log(std::max(p - b.lo, 1e-9));
}

inline double to_original(const ParamBox& b, double x) {
  if (b.scale == Scale::Logit) {
    double z = 1.0 / (1.0 + std::exp(-x));
    return b.lo + (b.hi - b.lo) * z;
  }
  return b.lo + std::exp(std::min(x, 700.0));
}

inline std::vector<double> to_original_vec(const std::vector<ParamBox>& boxes,
                                           const std::vector<double>& x) {
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = to_original(boxes[i], x[i]);
  return p;
}

inline std::vector<double> to_unconstrained_vec(
    const std::vector<ParamBox>& boxes, const std::vector<double>& p) {
  std::vector<double> x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    x[i] = to_unconstrained(boxes[i], p[i]);
  return x;
}

// Five deterministic starting points spanning weak to strong dependence and
// a range of transform values (three-parameter fits are sensitive to the
// initialization, so the spread matters more than the exact numbers).
inline std::vector<std::vector<double>> initial_points(const ModelSpec& spec) {
  std::array<double, 5> al{};
  switch (spec.family) {
    case Family::Plackett: al = {0.25, 1.0, 3.0, 8.0, 20.0}; break;
    case Family::Gumbel: al = {0.9, 0.75, 0.55, 0.35, 0.18}; break;
    default: al = {0.15, 0.5, 1.25, 3.0, 7.0}; break;
  }
  // Rows of (alpha index, asymmetry exponent(s), frailty parameter).
  struct Row {
    int a;
    double asym1, asym2, beta;
  };
  std::array<Row, 5> rows{};
  if (spec.level == 1) {
    rows = {Row{0, 1, 1, 0}, {1, 1, 1, 0}, {2, 1, 1, 0}, {3, 1, 1, 0},
            {4, 1, 1, 0}};
  } else if (spec.level == 2) {
    if (spec.side == AsymSide::Both)
      rows = {Row{1, 0.95, 0.95, 0}, {2, 0.7, 0.7, 0}, {2, 0.95, 0.55, 0},
              {3, 0.8, 0.8, 0}, {0, 0.9, 0.9, 0}};
    else
      rows = {Row{1, 0.95, 0.95, 0}, {2, 0.75, 0.75, 0}, {2, 0.5, 0.5, 0},
              {3, 0.85, 0.85, 0}, {0, 0.9, 0.9, 0}};
  } else {
    if (spec.side == AsymSide::Both)
      rows = {Row{1, 0.9, 0.9, 0.1}, {2, 0.7, 0.7, 0.3}, {2, 0.9, 0.6, 0.5},
              {3, 0.8, 0.8, 0.2}, {0, 0.9, 0.9, 0.6}};
    else
      rows = {Row{1, 0.9, 0.9, 0.1}, {2, 0.75, 0.75, 0.3}, {2, 0.55, 0.55, 0.6},
              {3, 0.85, 0.85, 0.2}, {1, 0.95, 0.95, 0.8}};
  }
  std::vector<std::vector<double>> points;
  for (const Row& r : rows) {
    std::vector<double> p = {al[static_cast<std::size_t>(r.a)]};
    if (spec.has_theta()) p.push_back(r.asym1);
    if (spec.has_delta())
      p.push_back(spec.side == AsymSide::Both ? r.asym2 : r.asym1);
    if (spec.has_beta()) p.push_back(r.beta);
    points.push_back(std::move(p));
  }
  return points;
}

// Lifts a restricted fit's parameters into a full spec's parameter vector.
// Missing transform parameters are filled with their identity values when
// `exact_boundary` (asymmetrize(c,1,1) and frailty_mix(c,0) are structural
// identities, so the lifted likelihood equals the restricted one), or with
// nearby interior values usable as an optimization start otherwise.
inline std::vector<double> lift_params(const ModelSpec& full,
                                       const FitResult& restricted,
                                       bool exact_boundary) {
  std::vector<double> out;
  auto names = full.param_names();
  for (const std::string& name : names) {
    auto it = std::find(restricted.param_names.begin(),
                        restricted.param_names.end(), name);
    if (it != restricted.param_names.end()) {
      out.push_back(restricted.params[static_cast<std::size_t>(
          it - restricted.param_names.begin())]);
    } else if (name == "beta") {
      out.push_back(exact_boundary ? 0.0 : 0.05);
    } else {
      out.push_back(exact_boundary ? 1.0 : 0.98);
    }
  }
  return out;
}

// Cholesky-based inverse of a symmetric positive definite matrix, or nullopt
// when the matrix is not positive definite.
inline std::optional<std::vector<std::vector<double>>> invert_spd(
    std::vector<std::vector<double>> m) {
  const std::size_t d = m.size();
  std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    double diag = m[j][j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    l[j][j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  // Solve L L^T X = I column by column.
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  std::vector<double> y(d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
      y[i] = s / l[i][i];
    }
    for (std::size_t ii = d; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < d; ++k) s -= l[k][ii] * inv[k][c];
      inv[ii][c] = s / l[ii][ii];
    }
  }
  return inv;
}

}  // namespace detail

// Second derivatives of the copula log-likelihood at `params` by central
// finite differences in the original parameter space, step 1e-4 * (1 + |p|).
inline std::vector<std::vector<double>> loglik_hessian(
    const std::vector<std::pair<double, double>>& pairs, const ModelSpec& spec,
    const std::vector<double>& params, int* eval_counter = nullptr) {
  const std::size_t d = params.size();
  auto f = [&](const std::vector<double>& q) {
    if (eval_counter) ++*eval_counter;
    return copula_loglik(pairs, spec.build(q));
  };
  std::vector<double> h(d);
  for (std::size_t i = 0; i < d; ++i) h[i] = 1e-4 * (1.0 + std::abs(params[i]));
  std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
  const double f0 = f(params);
  for (std::size_t i = 0; i < d; ++i) {
    auto p = params;
    p[i] = params[i] + h[i];
    double fp = f(p);
    p[i] = params[i] - h[i];
    double fm = f(p);
    hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      auto p = params;
      p[i] = params[i] + h[i];
      p[j] = params[j] + h[j];
      double fpp = f(p);
      p[j] = params[j] - h[j];
      double fpm = f(p);
      p[i] = params[i] - h[i];
      double fmm = f(p);
      p[j] = params[j] + h[j];
      double fmp = f(p);
      hess[i][j] = hess[j][i] =
          (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

// ---------------------------------------------------------------------------
// Maximum-likelihood fitting.

inline FitResult fit_copula_ml(
    const SampleSet& pseudo, const ModelSpec& spec,
    const std::optional<std::vector<double>>& init = std::nullopt,
    const FitResult* restricted = nullptr) {
  spec.validate();
  const auto& pairs = pseudo.pairs;
  FitResult out;
  out.spec = spec;
  out.param_names = spec.param_names();
  out.n_obs = pairs.size();
  if (pairs.size() < 2)
    throw domain_error("fit_copula_ml: need at least 2 observations");

  const auto boxes = detail::boxes_for(spec);
  const std::size_t dim = boxes.size();
  if (init && init->size() != dim)
    throw domain_error("fit_copula_ml: init has wrong length");

  // The exploration phase scores candidate basins on a strided subsample so
  // multi-start stays cheap on large samples; the winner is re-ranked and
  // polished on the full likelihood.
  const std::size_t stride = std::max<std::size_t>(1, pairs.size() / 1200);
  auto neg_loglik = [&](const std::vector<double>& x, std::size_t step) {
    ++out.n_eval;
    auto p = detail::to_original_vec(boxes, x);
    Copula c = spec.build(p);
    double s = 0.0;
    for (std::size_t i = 0; i < pairs.size(); i += step)
      s += std::log(std::max(c.density(pairs[i].first, pairs[i].second),
                             1e-300));
    return -s;
  };
  auto coarse = [&](const std::vector<double>& x) {
    return neg_loglik(x, stride);
  };
  auto full = [&](const std::vector<double>& x) { return neg_loglik(x, 1); };

  std::vector<std::vector<double>> starts = detail::initial_points(spec);
  if (init) starts.push_back(*init);
  const bool restricted_usable = restricted != nullptr &&
                                 restricted->n_obs == out.n_obs &&
                                 std::isfinite(restricted->loglik) &&
                                 spec.nests(restricted->spec);
  if (restricted_usable)
    starts.push_back(detail::lift_params(spec, *restricted, false));

  SimplexOptions explore;
  explore.initial_step = 0.3;
  explore.f_abs_tol = 1e-7;
  explore.f_rel_tol = 1e-9;
  explore.x_tol = 1e-7;
  explore.max_evaluations = 160 * static_cast<int>(dim);

  std::vector<std::vector<double>> candidates;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    try {
      auto r = nelder_mead(coarse, detail::to_unconstrained_vec(boxes, starts[k]),
                           explore);
      candidates.push_back(std::move(r.x));
    } catch (const numeric_error& e) {
      out.notes.push_back("start " + std::to_string(k + 1) +
                          " aborted: " + e.what());
    }
  }
  if (candidates.empty()) {
    out.notes.push_back("all starts failed; no estimate available");
    return out;
  }

  std::size_t best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    try {
      double fk = full(candidates[k]);
      if (fk < best_f) {
        best_f = fk;
        best = k;
      }
    } catch (const numeric_error& e) {
      out.notes.push_back("candidate " + std::to_string(k + 1) +
                          " rejected: " + e.what());
    }
  }
  if (!std::isfinite(best_f)) {
    out.notes.push_back("all candidates failed full-likelihood evaluation");
    return out;
  }

  SimplexOptions polish;
  polish.initial_step = 0.05;
  polish.f_abs_tol = 1e-9;
  polish.f_rel_tol = 1e-12;
  polish.x_tol = 1e-9;
  polish.max_evaluations = 500 * static_cast<int>(dim);
  std::vector<double> best_x = candidates[best];
  bool converged = false;
  try {
    auto r = nelder_mead(full, best_x, polish);
    if (r.value <= best_f) {
      best_x = r.x;
      best_f = r.value;
    }
    converged = r.converged;
  } catch (const numeric_error& e) {
    out.notes.push_back(std::string("polish aborted: ") + e.what());
  }

  out.params = detail::to_original_vec(boxes, best_x);
  out.loglik = -best_f;
  out.converged = converged;

  // A lifted model can never fit worse than its restriction: if optimization
  // fell short, adopt the restriction's optimum with the extra parameters
  // pinned at their identity values.
  if (restricted_usable) {
    auto pinned = detail::lift_params(spec, *restricted, true);
    double pinned_loglik = copula_loglik(pairs, spec.build(pinned));
    ++out.n_eval;
    if (pinned_loglik > out.loglik) {
      out.params = pinned;
      out.loglik = pinned_loglik;
      out.converged = true;
      out.notes.push_back(
          "optimum adopted from the restricted model (boundary solution)");
    }
  }

  for (std::size_t i = 0; i < dim; ++i) {
    const auto& b = boxes[i];
    bool near_lo = std::isfinite(b.lo) && out.params[i] - b.lo < 1e-3;
    bool near_hi = std::isfinite(b.hi) && b.hi - out.params[i] < 1e-3;
    if (near_lo || near_hi) {
      out.degenerate = true;
      out.notes.push_back(b.name + " is at its box edge");
    }
  }

  out.bic_value = bic(out.loglik, dim, out.n_obs);

  if (!out.degenerate) {
    try {
      out.hessian = loglik_hessian(pairs, spec, out.params, &out.n_eval);
      auto info = out.hessian;  // observed information = -hessian
      for (auto& row : info)
        for (double& x : row) x = -x;
      auto inv = detail::invert_spd(std::move(info));
      if (inv) {
        out.stderrs.resize(dim);
        for (std::size_t i = 0; i < dim; ++i)
          out.stderrs[i] = std::sqrt(std::max((*inv)[i][i], 0.0));
      } else {
        out.notes.push_back(
            "information matrix not positive definite; no standard errors");
      }
    } catch (const numeric_error& e) {
      out.notes.push_back(std::string("hessian evaluation failed: ") +
                          e.what());
    }
    return out;
  }

  // Degenerate (boundary) fit: report the adjacent restricted model's
  // standard errors for the parameters they share.
  const FitResult* source = restricted_usable ? restricted : nullptr;
  FitResult internal;
  if (source == nullptr && spec.level > 1) {
    internal = fit_copula_ml(pseudo, spec.restricted_spec());
    out.n_eval += internal.n_eval;
    source = &internal;
  }
  out.stderrs.assign(dim, std::nullopt);
  if (source != nullptr && !source->stderrs.empty()) {
    for (std::size_t i = 0; i < dim; ++i) {
      auto it = std::find(source->param_names.begin(),
                          source->param_names.end(), out.param_names[i]);
      if (it != source->param_names.end()) {
        auto j =
            static_cast<std::size_t>(it - source->param_names.begin());
        if (j < source->stderrs.size()) out.stderrs[i] = source->stderrs[j];
      }
    }
    out.notes.push_back(
        "boundary solution: standard errors taken from the restricted model");
  } else {
    out.notes.push_back(
        "boundary solution and no restricted model available; no standard "
        "errors");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model comparison.

inline LrTest lr_test(const FitResult& restricted, const FitResult& full) {
  if (!full.spec.nests(restricted.spec))
    throw domain_error("lr_test: the restricted model is not nested in the "
                       "full model");
  if (restricted.n_obs != full.n_obs)
    throw domain_error("lr_test: fits use different samples");
  LrTest t;
  t.df = static_cast<int>(full.params.size()) -
         static_cast<int>(restricted.params.size());
  t.statistic = -2.0 * (restricted.loglik - full.loglik);
  if (t.df == 0)
    t.p_value = t.statistic <= 1e-9 ? 1.0 : 0.0;
  else
    t.p_value =
        boost::math::gamma_q(0.5 * t.df, 0.5 * std::max(t.statistic, 0.0));
  return t;
}

// Closed-form upper-tail coefficient and its delta-method standard error for
// one-parameter Clayton-survival and Gumbel fits.
inline TailEstimate tail_estimate(const FitResult& fit) {
  if (fit.spec.level != 1)
    throw domain_error(
        "tail_estimate: closed form unavailable for transformed models; use "
        "the numerical tail probes instead");
  if (fit.params.empty() || fit.stderrs.empty() || !fit.stderrs[0])
    throw domain_error("tail_estimate: fit lacks a standard error for alpha");
  const double alpha = fit.params[0];
  const double sd_alpha = *fit.stderrs[0];
  switch (fit.spec.family) {
    case Family::ClaytonSurvival: {
      double lambda = lambda_upper_clayton_survival(alpha);
      double deriv = std::log(2.0) / (alpha * alpha) * lambda;
      return {lambda, deriv * sd_alpha};
    }
    case Family::Gumbel: {
      double lambda = lambda_upper_gumbel(alpha);
      double deriv = std::log(2.0) * std::exp2(alpha);
      return {lambda, deriv * sd_alpha};
    }
    default:
      throw domain_error(
          "tail_estimate: no closed-form tail coefficient for this family; "
          "use the numerical tail probes instead");
  }
}

// ---------------------------------------------------------------------------
// Ladder and grid orchestration.

struct LadderFit {
  Family family = Family::Plackett;
  AsymSide side = AsymSide::Second;
  std::vector<FitResult> levels;  // ascending ladder levels
  std::vector<LrTest> lr_chain;   // level k vs. level k+1
  std::optional<TailEstimate> tail;  // from the base fit when available
};

inline LadderFit fit_ladder(const SampleSet& pseudo, Family family,
                            AsymSide side = AsymSide::Second,
                            int max_level = 3) {
  if (max_level < 1 || max_level > 3)
    throw domain_error("fit_ladder: max_level must be 1, 2, or 3");
  LadderFit lf;
  lf.family = family;
  lf.side = side;
  for (int level = 1; level <= max_level; ++level) {
    ModelSpec spec{family, level, side};
    const FitResult* prev = lf.levels.empty() ? nullptr : &lf.levels.back();
    lf.levels.push_back(fit_copula_ml(pseudo, spec, std::nullopt, prev));
    if (level > 1)
      lf.lr_chain.push_back(
          lr_test(lf.levels[lf.levels.size() - 2], lf.levels.back()));
  }
  try {
    lf.tail = tail_estimate(lf.levels.front());
  } catch (const domain_error&) {
    // No closed form (Plackett) or no standard error: leave empty.
  }
  return lf;
}

struct GridFit {
  std::vector<LadderFit> ladders;  // sorted by family, independent of input order
  std::size_t best_ladder = 0;
  std::size_t best_level = 0;  // index into ladders[best_ladder].levels
  const FitResult& best() const { return ladders[best_ladder].levels[best_level]; }
};

// Grid entry: one family ladder fitted up to `max_level`.
struct GridEntry {
  Family family = Family::Plackett;
  int max_level = 3;
};

inline GridFit fit_grid(const SampleSet& pseudo, std::vector<GridEntry> entries,
                        AsymSide side = AsymSide::Second) {
  if (entries.empty()) throw domain_error("fit_grid: empty model grid");
  // Canonical family order; duplicated families keep their deepest ladder.
  std::sort(entries.begin(), entries.end(), [](const GridEntry& a,
                                               const GridEntry& b) {
    return a.family != b.family ? a.family < b.family
                                : a.max_level > b.max_level;
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const GridEntry& a, const GridEntry& b) {
                              return a.family == b.family;
                            }),
                entries.end());
  for (const GridEntry& e : entries) {
    ModelSpec{e.family, 1, side}.validate();
    if (e.max_level < 1 || e.max_level > 3)
      throw domain_error("fit_grid: ladder level must be 1, 2, or 3");
  }

  GridFit grid;
  // Each family ladder is a self-contained job; dispatch them concurrently
  // (worker count bounded by the number of families, at most three).
  std::vector<std::future<LadderFit>> jobs;
  jobs.reserve(entries.size());
  for (const GridEntry& e : entries)
    jobs.push_back(std::async(std::launch::async,
                              [&pseudo, side, e] {
                                return fit_ladder(pseudo, e.family, side,
                                                  e.max_level);
                              }));
  for (auto& j : jobs) grid.ladders.push_back(j.get());

  bool found = false;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < grid.ladders.size(); ++l) {
    for (std::size_t k = 0; k < grid.ladders[l].levels.size(); ++k) {
      const FitResult& fit = grid.ladders[l].levels[k];
      if (!std::isfinite(fit.bic_value)) continue;
      // Deterministic tie-break: smaller BIC, then fewer parameters, then
      // family order.
      if (!found || fit.bic_value < best_bic - 1e-12 ||
          (std::abs(fit.bic_value - best_bic) <= 1e-12 &&
           k < grid.best_level)) {
        found = true;
        best_bic = fit.bic_value;
        grid.best_ladder = l;
        grid.best_level = k;
      }
    }
  }
  if (!found)
    throw numeric_error("fit_grid: every model in the grid failed to fit");
  return grid;
}

inline GridFit fit_grid(const SampleSet& pseudo,
                        std::vector<Family> families = {Family::Plackett,
                                                        Family::Gumbel,
                                                        Family::ClaytonSurvival},
                        AsymSide side = AsymSide::Second, int max_level = 3) {
  std::vector<GridEntry> entries;
  entries.reserve(families.size());
  for (Family f : families) entries.push_back({f, max_level});
  return fit_grid(pseudo, std::move(entries), side);
}

}  // namespace asymcop
