#pragma once

// Tail-dependence indices, the Pickands dependence function of the logistic
// (asymmetrized Gumbel) family, closed-form Kendall tau where available, and
// numerical diagonal tail probes.
//
// Numerical limits are reported as probe sequences, never extrapolated
// scalars: diagonal ratios converge slowly and extrapolating would
// manufacture precision the data does not carry.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asymcop/common.hpp"
#include "asymcop/construct.hpp"
#include "asymcop/copula.hpp"

namespace asymcop {

enum class TailSide { Lower, Upper };
enum class TailMethod { ClosedForm, NumericalLimit };

// A tail-dependence finding. Closed-form results carry the index itself;
// numerical results carry the probe sequence (u, ratio) and a flag saying
// whether the ratios move monotonically. When several closed-form
// conventions compete, all are listed in `candidates` with labels and no
// single one is promoted into lambda_lower / lambda_upper.
struct TailReport {
  std::optional<double> lambda_upper;
  std::optional<double> lambda_lower;
  TailMethod method = TailMethod::ClosedForm;
  std::vector<std::pair<double, double>> probe_points;
  bool monotone = true;
  std::vector<std::pair<std::string, double>> candidates;
};

// Index of upper-tail dependence of the survival-reflected Clayton family:
// 2^(-1/alpha).
inline double lambda_upper_clayton_survival(double alpha) {
  if (!(alpha > 0.0)) {
    throw domain_error("lambda_upper_clayton_survival: alpha must be > 0");
  }
  return std::exp2(-1.0 / alpha);
}

// Index of upper-tail dependence of the Gumbel family: 2 - 2^alpha.
inline double lambda_upper_gumbel(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw domain_error("lambda_upper_gumbel: alpha must be in (0, 1]");
  }
  return 2.0 - std::exp2(alpha);
}

namespace detail {

inline bool ratios_monotone(const std::vector<std::pair<double, double>>& p) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i].second > p[i - 1].second + 1e-12) down = false;
    if (p[i].second < p[i - 1].second - 1e-12) up = false;
  }
  return up || down;
}

}  // namespace detail

// Diagonal ratio probes of a copula model. Lower side: C(u,u)/u as u -> 0.
// Upper side: (1 - 2u + C(u,u)) / (1 - u) as u -> 1. Ratios are reported at
// the given probe points only; no extrapolation is performed.
inline TailReport numerical_tail_probe(const Copula& model, TailSide side,
                                       const std::vector<double>& probes) {
  TailReport report;
  report.method = TailMethod::NumericalLimit;
  for (double u : probes) {
    if (!(u > 0.0) || !(u < 1.0)) {
      throw domain_error("numerical_tail_probe: probes must lie in (0, 1)");
    }
    double ratio;
    if (side == TailSide::Lower) {
      // Deep probes go through the log-domain evaluator to dodge underflow.
      double a = -std::log(u);
      ratio = std::exp(-(model.neg_log_cdf_exp(a, a) - a));
    } else {
      ratio = (1.0 - 2.0 * u + model.cdf(u, u)) / (1.0 - u);
    }
    require_finite(ratio, "numerical_tail_probe", u, u);
    report.probe_points.emplace_back(u, ratio);
  }
  report.monotone = detail::ratios_monotone(report.probe_points);
  return report;
}

// Lower-tail behaviour of the gamma-frailty mixture whose inner copula is a
// one-sided asymmetrized Gumbel. The diagonal of the inner model is exactly
// u^r with r = 1 - theta + (theta^(1/alpha) + 1)^alpha, so the mixture's
// diagonal ratio is (1 + r*phi(u))^(-1/beta) / u with the gamma transform
// phi. Two conventions circulate for the exponent of r (-beta vs -1/beta)
// and two for r itself (the form above vs the variant with the exponents
// swapped); the report lists all four labelled candidates together with
// finite-u probes and promotes none of them.
inline TailReport lambda_lower_frailty_gumbel(double alpha, double theta,
                                              double beta) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw domain_error("lambda_lower_frailty_gumbel: alpha must be in (0, 1]");
  }
  if (!(theta >= 0.0) || theta > 1.0) {
    throw domain_error("lambda_lower_frailty_gumbel: theta must be in [0, 1]");
  }
  if (!(beta > 0.0)) {
    throw domain_error("lambda_lower_frailty_gumbel: beta must be > 0");
  }
  double r = 1.0 - theta + std::pow(std::pow(theta, 1.0 / alpha) + 1.0, alpha);
  double r_swapped =
      1.0 - theta + std::pow(std::pow(theta, alpha) + 1.0, 1.0 / alpha);

  Copula model = frailty_mix(
      asymmetrize_one_sided(Copula::gumbel(alpha), theta), beta);
  TailReport report =
      numerical_tail_probe(model, TailSide::Lower, {1e-2, 1e-4, 1e-6});
  report.candidates = {
      {"r", r},
      {"r_swapped_exponents", r_swapped},
      {"r^(-beta)", std::pow(r, -beta)},
      {"r^(-1/beta)", std::pow(r, -1.0 / beta)},
      {"r_swapped^(-beta)", std::pow(r_swapped, -beta)},
      {"r_swapped^(-1/beta)", std::pow(r_swapped, -1.0 / beta)},
  };
  return report;
}

// Pickands dependence function of the asymmetrized Gumbel (asymmetric
// logistic) extreme-value copula, with t the relative weight of the second
// coordinate: C(u,v) = exp(-(a+b) * A(b/(a+b))) for a=-ln u, b=-ln v.
inline double pickands_A_logistic(double t, double alpha, double theta,
                                  double delta) {
  if (!(t >= 0.0) || t > 1.0) {
    throw domain_error("pickands_A_logistic: t must be in [0, 1]");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw domain_error("pickands_A_logistic: alpha must be in (0, 1]");
  }
  if (!(theta >= 0.0) || theta > 1.0 || !(delta >= 0.0) || delta > 1.0) {
    throw domain_error(
        "pickands_A_logistic: theta, delta must be in [0, 1]");
  }
  double ia = 1.0 / alpha;
  double s = std::pow(theta * (1.0 - t), ia) + std::pow(delta * t, ia);
  return (1.0 - theta) * (1.0 - t) + (1.0 - delta) * t + std::pow(s, alpha);
}

// Closed-form Kendall tau. `is_bound` marks values that are only an upper
// bound (the singular-component bound for asymmetrized models), not the tau
// of the model itself.
struct ClosedFormTau {
  double value = 0.0;
  bool is_bound = false;
};

inline std::optional<ClosedFormTau> kendall_tau_closed(const Copula& model) {
  auto param = [&](const char* name) -> std::optional<double> {
    for (const auto& [key, value] : model.params()) {
      if (key == name) return value;
    }
    return std::nullopt;
  };
  switch (model.family()) {
    case Family::Independence:
      return ClosedFormTau{0.0, false};
    case Family::Clayton:
    case Family::ClaytonSurvival: {
      double a = *param("alpha");
      return ClosedFormTau{a / (a + 2.0), false};
    }
    case Family::Gumbel:
      return ClosedFormTau{1.0 - *param("alpha"), false};
    case Family::Asymmetrized: {
      double th = *param("theta"), de = *param("delta");
      double denom = th + de - th * de;
      double bound = denom <= 0.0 ? 0.0 : th * de / denom;
      return ClosedFormTau{bound, true};
    }
    default:
      return std::nullopt;  // no closed form
  }
}

}  // namespace asymcop
