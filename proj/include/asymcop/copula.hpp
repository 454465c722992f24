#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "asymcop/common.hpp"

namespace asymcop {

// Public family tag. Transformed models report Asymmetrized / FrailtyMixed;
// the survival-reflected Clayton base reports ClaytonSurvival.
enum class Family {
  Independence,
  Plackett,
  Clayton,
  ClaytonSurvival,
  Gumbel,
  Asymmetrized,
  FrailtyMixed,
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Independence: return "independence";
    case Family::Plackett: return "plackett";
    case Family::Clayton: return "clayton";
    case Family::ClaytonSurvival: return "clayton_survival";
    case Family::Gumbel: return "gumbel";
    case Family::Asymmetrized: return "asymmetrized";
    case Family::FrailtyMixed: return "frailty_mixed";
  }
  return "unknown";
}

class Copula;
class Rng;
Copula asymmetrize(const Copula& base, double theta, double delta);
Copula asymmetrize_one_sided(const Copula& base, double delta);
Copula asymmetrize_survival_clayton(double alpha, double theta, double delta);
Copula survival_reflect(const Copula& base);
Copula frailty_mix(const Copula& inner, double beta);
std::pair<double, double> sample_pair(const Copula& model, Rng& rng);
bool is_max_stable(const Copula& model);

// Immutable bivariate copula model. Base families are Independence, Plackett,
// Clayton, Gumbel; composite nodes are the survival reflection
// C(u,v) = u + v - 1 + K(1-u, 1-v), the two-exponent asymmetrization
// C(u,v) = u^(1-theta) v^(1-delta) K(u^theta, v^delta), and the Gamma-frailty
// mixture C(u,v) = phi_inv(-log K(exp(-phi(u)), exp(-phi(v)))) with
// phi(s) = s^(-beta) - 1.
class Copula {
 public:
  // C(u, v). Inputs are clamped into [kUnitEps, 1 - kUnitEps]; the result is
  // clipped into the Frechet band [max(0, u + v - 1), min(u, v)].
  double cdf(double u, double v) const {
    u = clamp_unit(u);
    v = clamp_unit(v);
    double c = cdf_impl(u, v);
    c = require_finite(c, "Copula::cdf", u, v);
    double lo = std::max(0.0, u + v - 1.0);
    double hi = std::min(u, v);
    return std::clamp(c, lo, hi);
  }

  // Copula density. Arguments must lie in the open unit square. Every node
  // is analytic; composite nodes chain through the log-domain derivatives.
  double density(double u, double v) const {
    require_interior(u, v, "Copula::density");
    double d = density_impl(u, v);
    d = require_finite(d, "Copula::density", u, v);
    return std::max(d, 0.0);
  }

  // Conditional cdf of the second coordinate given the first,
  // d C(u, v) / d u. u must be interior; v is clamped.
  double conditional_cdf(double u, double v) const {
    if (!interior(u)) require_interior(u, 0.5, "Copula::conditional_cdf");
    v = clamp_unit(v);
    double p = partial_first(u, v);
    p = require_finite(p, "Copula::conditional_cdf", u, v);
    return std::clamp(p, 0.0, 1.0);
  }

  // Conditional cdf of the first coordinate given the second, d C / d v.
  double conditional_cdf_given_v(double u, double v) const {
    if (!interior(v)) require_interior(0.5, v, "Copula::conditional_cdf_given_v");
    u = clamp_unit(u);
    double p = partial_second(u, v);
    p = require_finite(p, "Copula::conditional_cdf_given_v", u, v);
    return std::clamp(p, 0.0, 1.0);
  }

  // -log C(exp(-a), exp(-b)) for a, b >= 0, evaluated in the log domain so
  // deep-tail arguments neither underflow nor cancel. This is the form the
  // frailty composition consumes.
  double neg_log_cdf_exp(double a, double b) const {
    if (!(a >= 0.0) || !(b >= 0.0))
      throw domain_error("Copula::neg_log_cdf_exp: a, b must be >= 0");
    double t = neg_log_impl(a, b);
    if (!std::isfinite(t)) throw_numeric("Copula::neg_log_cdf_exp", a, b);
    return std::max(t, 0.0);
  }

  Family family() const {
    switch (kind_) {
      case Kind::Independence: return Family::Independence;
      case Kind::Plackett: return Family::Plackett;
      case Kind::Clayton: return Family::Clayton;
      case Kind::Gumbel: return Family::Gumbel;
      case Kind::Asymmetrized: return Family::Asymmetrized;
      case Kind::FrailtyMixed: return Family::FrailtyMixed;
      case Kind::Survival:
        switch (inner_->kind_) {
          case Kind::Clayton: return Family::ClaytonSurvival;
          case Kind::Independence: return Family::Independence;
          default: return inner_->family();
        }
    }
    return Family::Independence;
  }

  // Flattened (name, value) list: own transform parameters first, then the
  // wrapped model's, e.g. beta, theta, delta, alpha for the deepest ladder.
  std::vector<std::pair<std::string, double>> params() const {
    std::vector<std::pair<std::string, double>> out;
    collect_params(out);
    return out;
  }

  std::shared_ptr<const Copula> inner() const { return inner_; }

  std::string describe() const {
    char buf[64];
    switch (kind_) {
      case Kind::Independence: return "independence";
      case Kind::Plackett:
        std::snprintf(buf, sizeof buf, "plackett(alpha=%g)", alpha_);
        return buf;
      case Kind::Clayton:
        std::snprintf(buf, sizeof buf, "clayton(alpha=%g)", alpha_);
        return buf;
      case Kind::Gumbel:
        std::snprintf(buf, sizeof buf, "gumbel(alpha=%g)", alpha_);
        return buf;
      case Kind::Survival: return "survival[" + inner_->describe() + "]";
      case Kind::Asymmetrized:
        std::snprintf(buf, sizeof buf, "asym(theta=%g,delta=%g)[", theta_,
                      delta_);
        return buf + inner_->describe() + "]";
      case Kind::FrailtyMixed:
        std::snprintf(buf, sizeof buf, "frailty(beta=%g)[", beta_);
        return buf + inner_->describe() + "]";
    }
    return "unknown";
  }

  static Copula independence() { return Copula(Kind::Independence); }

  static Copula plackett(double alpha) {
    if (!std::isfinite(alpha) || alpha < -1.0)
      throw domain_error("plackett: alpha must be finite and >= -1");
    if (std::fabs(alpha) <= kLimitEps) return independence();
    Copula c(Kind::Plackett);
    c.alpha_ = alpha;
    return c;
  }

  static Copula clayton(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0)
      throw domain_error("clayton: alpha must be finite and >= 0");
    if (alpha <= kLimitEps) return independence();
    Copula c(Kind::Clayton);
    c.alpha_ = alpha;
    return c;
  }

  static Copula gumbel(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0)
      throw domain_error("gumbel: alpha must lie in (0, 1]");
    if (alpha >= 1.0 - kLimitEps) return independence();
    Copula c(Kind::Gumbel);
    c.alpha_ = alpha;
    return c;
  }

  static Copula clayton_survival(double alpha) {
    Copula base = clayton(alpha);
    if (base.kind_ == Kind::Independence) return base;
    Copula c(Kind::Survival);
    c.inner_ = std::make_shared<const Copula>(std::move(base));
    return c;
  }

 private:
  enum class Kind {
    Independence,
    Plackett,
    Clayton,
    Gumbel,
    Asymmetrized,
    Survival,
    FrailtyMixed,
  };

  explicit Copula(Kind k) : kind_(k) {}

  friend Copula asymmetrize(const Copula& base, double theta, double delta);
  friend Copula survival_reflect(const Copula& base);
  friend Copula frailty_mix(const Copula& inner, double beta);
  friend std::pair<double, double> sample_pair(const Copula& model, Rng& rng);
  friend bool is_max_stable(const Copula& model);

  void collect_params(std::vector<std::pair<std::string, double>>& out) const {
    switch (kind_) {
      case Kind::Independence: return;
      case Kind::Plackett:
      case Kind::Clayton:
      case Kind::Gumbel:
        out.emplace_back("alpha", alpha_);
        return;
      case Kind::Survival:
        inner_->collect_params(out);
        return;
      case Kind::Asymmetrized:
        out.emplace_back("theta", theta_);
        out.emplace_back("delta", delta_);
        inner_->collect_params(out);
        return;
      case Kind::FrailtyMixed:
        out.emplace_back("beta", beta_);
        inner_->collect_params(out);
        return;
    }
  }

  // ---- plain-domain evaluation -------------------------------------------

  double cdf_impl(double u, double v) const {
    switch (kind_) {
      case Kind::Independence:
        return u * v;
      case Kind::Clayton:
        return std::exp(-clayton_neg_log(-std::log(u), -std::log(v)));
      case Kind::Gumbel:
        return std::exp(-gumbel_neg_log(-std::log(u), -std::log(v)));
      case Kind::Plackett:
        return plackett_cdf_raw(u, v);
      case Kind::Survival:
        return inner_->corner_survival(u, v);
      case Kind::Asymmetrized: {
        double x = std::pow(u, theta_);
        double y = std::pow(v, delta_);
        return std::pow(u, 1.0 - theta_) * std::pow(v, 1.0 - delta_) *
               inner_->cdf_impl(x, y);
      }
      case Kind::FrailtyMixed: {
        double t = inner_->neg_log_impl(frailty_phi(u), frailty_phi(v));
        return std::exp(-std::log1p(t) / beta_);
      }
    }
    return 0.0;
  }

  double density_impl(double u, double v) const {
    switch (kind_) {
      case Kind::Independence:
        return 1.0;
      case Kind::Clayton: {
        double a = -std::log(u), b = -std::log(v);
        double t = clayton_neg_log(a, b);
        return (1.0 + alpha_) *
               std::exp((1.0 + alpha_) * (a + b) - (1.0 + 2.0 * alpha_) * t);
      }
      case Kind::Gumbel: {
        double a = -std::log(u), b = -std::log(v);
        double ia = 1.0 / alpha_;
        double S = std::pow(a, ia) + std::pow(b, ia);
        double Sa = std::pow(S, alpha_);
        return std::exp(-Sa + a + b) * std::pow(a * b, ia - 1.0) *
               std::pow(S, alpha_ - 2.0) * (Sa + ia - 1.0);
      }
      case Kind::Plackett: {
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 0.0));
        double num = (alpha_ + 1.0) * (1.0 + alpha_ * (u + v - 2.0 * u * v));
        return num / (D * D * D);
      }
      case Kind::Survival:
        return inner_->density_impl(1.0 - u, 1.0 - v);
      case Kind::Asymmetrized: {
        double a = 1.0 - theta_, b = 1.0 - delta_;
        double x = std::pow(u, theta_);
        double y = std::pow(v, delta_);
        double K = inner_->cdf_impl(x, y);
        double Kx = inner_->partial_first(x, y);
        double Ky = inner_->partial_second(x, y);
        double Kxy = inner_->density_impl(x, y);
        double inner_u = a * K + theta_ * x * Kx;
        double inner_uv = a * Ky + theta_ * x * Kxy;
        return std::pow(u, a - 1.0) * std::pow(v, b - 1.0) *
               (b * inner_u + delta_ * y * inner_uv);
      }
      case Kind::FrailtyMixed: {
        double a = -std::log(u), b = -std::log(v);
        double n = neg_log_impl(a, b);
        double cross =
            dneg_log_da(a, b) * dneg_log_db(a, b) - d2neg_log_dadb(a, b);
        return std::exp(a + b - n) * std::max(cross, 0.0);
      }
    }
    return 0.0;
  }

  double partial_first(double u, double v) const {
    switch (kind_) {
      case Kind::Independence:
        return v;
      case Kind::Clayton: {
        double a = -std::log(u), b = -std::log(v);
        double t = clayton_neg_log(a, b);
        return std::exp((1.0 + alpha_) * (a - t));
      }
      case Kind::Gumbel: {
        double a = -std::log(u), b = -std::log(v);
        double ia = 1.0 / alpha_;
        double S = std::pow(a, ia) + std::pow(b, ia);
        return std::exp(-std::pow(S, alpha_) + a) *
               std::pow(S, alpha_ - 1.0) * std::pow(a, ia - 1.0);
      }
      case Kind::Plackett: {
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 1e-300));
        return 0.5 * (1.0 - (X - 2.0 * (alpha_ + 1.0) * v) / D);
      }
      case Kind::Survival:
        return 1.0 - inner_->partial_first(1.0 - u, 1.0 - v);
      case Kind::Asymmetrized: {
        double a = 1.0 - theta_, b = 1.0 - delta_;
        double x = std::pow(u, theta_);
        double y = std::pow(v, delta_);
        double K = inner_->cdf_impl(x, y);
        double Kx = inner_->partial_first(x, y);
        return std::pow(u, a - 1.0) * std::pow(v, b) *
               (a * K + theta_ * x * Kx);
      }
      case Kind::FrailtyMixed: {
        double pu = frailty_phi(u), pv = frailty_phi(v);
        double t = inner_->neg_log_impl(pu, pv);
        double g = inner_->dneg_log_da(pu, pv);
        return std::exp(-(1.0 / beta_ + 1.0) * std::log1p(t) -
                        (beta_ + 1.0) * std::log(u)) *
               g;
      }
    }
    return 0.0;
  }

  double partial_second(double u, double v) const {
    switch (kind_) {
      case Kind::Independence:
        return u;
      case Kind::Clayton: {
        double a = -std::log(u), b = -std::log(v);
        double t = clayton_neg_log(a, b);
        return std::exp((1.0 + alpha_) * (b - t));
      }
      case Kind::Gumbel: {
        double a = -std::log(u), b = -std::log(v);
        double ia = 1.0 / alpha_;
        double S = std::pow(a, ia) + std::pow(b, ia);
        return std::exp(-std::pow(S, alpha_) + b) *
               std::pow(S, alpha_ - 1.0) * std::pow(b, ia - 1.0);
      }
      case Kind::Plackett: {
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 1e-300));
        return 0.5 * (1.0 - (X - 2.0 * (alpha_ + 1.0) * u) / D);
      }
      case Kind::Survival:
        return 1.0 - inner_->partial_second(1.0 - u, 1.0 - v);
      case Kind::Asymmetrized: {
        double a = 1.0 - theta_, b = 1.0 - delta_;
        double x = std::pow(u, theta_);
        double y = std::pow(v, delta_);
        double K = inner_->cdf_impl(x, y);
        double Ky = inner_->partial_second(x, y);
        return std::pow(u, a) * std::pow(v, b - 1.0) *
               (b * K + delta_ * y * Ky);
      }
      case Kind::FrailtyMixed: {
        double pu = frailty_phi(u), pv = frailty_phi(v);
        double t = inner_->neg_log_impl(pu, pv);
        double g = inner_->dneg_log_db(pu, pv);
        return std::exp(-(1.0 / beta_ + 1.0) * std::log1p(t) -
                        (beta_ + 1.0) * std::log(v)) *
               g;
      }
    }
    return 0.0;
  }

  // ---- log-domain evaluation ---------------------------------------------

  double neg_log_impl(double a, double b) const {
    switch (kind_) {
      case Kind::Independence:
        return a + b;
      case Kind::Clayton:
        return clayton_neg_log(a, b);
      case Kind::Gumbel:
        return gumbel_neg_log(a, b);
      case Kind::Plackett: {
        double u = std::exp(-a), v = std::exp(-b);
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 0.0));
        return a + b - std::log(2.0 * (alpha_ + 1.0)) + std::log(X + D);
      }
      case Kind::Asymmetrized:
        return (1.0 - theta_) * a + (1.0 - delta_) * b +
               inner_->neg_log_impl(theta_ * a, delta_ * b);
      case Kind::FrailtyMixed:
        return std::log1p(inner_->neg_log_impl(std::expm1(beta_ * a),
                                               std::expm1(beta_ * b))) /
               beta_;
      case Kind::Survival: {
        double s = std::exp(-a), t = std::exp(-b);
        if (std::max(s, t) < 1e-8)
          return a + b - std::log(inner_->corner_coefficient());
        if (std::min(s, t) < 1e-8) {
          // One coordinate deep in the tail: linearize in the small one.
          if (s < t)
            return a - std::log1p(-inner_->partial_first(
                           1.0 - kUnitEps, clamp_unit(1.0 - t)));
          return b - std::log1p(-inner_->partial_second(clamp_unit(1.0 - s),
                                                        1.0 - kUnitEps));
        }
        return -std::log(inner_->corner_survival(s, t));
      }
    }
    return a + b;
  }

  double dneg_log_da(double a, double b) const {
    switch (kind_) {
      case Kind::Independence:
        return 1.0;
      case Kind::Clayton: {
        double m = std::max(a, b);
        double e = std::exp(-alpha_ * (m - a));
        return e / (e + std::exp(-alpha_ * (m - b)) - std::exp(-alpha_ * m));
      }
      case Kind::Gumbel: {
        double ia = 1.0 / alpha_;
        double S = std::pow(a, ia) + std::pow(b, ia);
        return std::pow(S, alpha_ - 1.0) * std::pow(a, ia - 1.0);
      }
      case Kind::Plackett: {
        double u = std::exp(-a), v = std::exp(-b);
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 1e-300));
        double dX = -alpha_ * u;
        double dD = (X * dX + 2.0 * alpha_ * (alpha_ + 1.0) * u * v) / D;
        return 1.0 + (dX + dD) / (X + D);
      }
      case Kind::Asymmetrized:
        return (1.0 - theta_) +
               theta_ * inner_->dneg_log_da(theta_ * a, delta_ * b);
      case Kind::FrailtyMixed: {
        double pa = std::expm1(beta_ * a), pb = std::expm1(beta_ * b);
        double t = inner_->neg_log_impl(pa, pb);
        return inner_->dneg_log_da(pa, pb) * std::exp(beta_ * a) / (1.0 + t);
      }
      case Kind::Survival: {
        double s = std::exp(-a), t = std::exp(-b);
        // Deep in u the cdf is linear in s, so -log C(e^-a, .) has unit
        // slope in a; returning the limit avoids a clamp mismatch between
        // the numerator and the cdf below.  When only the *other*
        // coordinate is extreme, q below is a complement of a value near
        // one and carries up to ~1e-3 relative cancellation noise; that is
        // an inherent double-precision limit of this representation.
        if (s < 1e-8) return 1.0;
        t = std::max(t, kUnitEps);
        double sv = std::max(inner_->corner_survival(s, t), 1e-300);
        double q = 1.0 - inner_->partial_first(clamp_unit(1.0 - s),
                                               clamp_unit(1.0 - t));
        return s * q / sv;
      }
    }
    return 1.0;
  }

  double dneg_log_db(double a, double b) const {
    switch (kind_) {
      case Kind::Asymmetrized:
        return (1.0 - delta_) +
               delta_ * inner_->dneg_log_db(theta_ * a, delta_ * b);
      case Kind::FrailtyMixed: {
        double pa = std::expm1(beta_ * a), pb = std::expm1(beta_ * b);
        double t = inner_->neg_log_impl(pa, pb);
        return inner_->dneg_log_db(pa, pb) * std::exp(beta_ * b) / (1.0 + t);
      }
      case Kind::Survival: {
        double s = std::exp(-a), t = std::exp(-b);
        if (t < 1e-8) return 1.0;
        s = std::max(s, kUnitEps);
        double sv = std::max(inner_->corner_survival(s, t), 1e-300);
        double q = 1.0 - inner_->partial_second(clamp_unit(1.0 - s),
                                                clamp_unit(1.0 - t));
        return t * q / sv;
      }
      default:
        // The remaining nodes are exchangeable.
        return dneg_log_da(b, a);
    }
  }

  // Mixed second derivative d^2 N / da db of N(a, b) = -log C(e^-a, e^-b).
  // Together with the first derivatives this yields the copula density:
  //   c(u, v) = C(u, v) (N_a N_b - N_ab) / (u v).
  double d2neg_log_dadb(double a, double b) const {
    switch (kind_) {
      case Kind::Independence:
        return 0.0;
      case Kind::Clayton:
        // e^{alpha N} = e^{alpha a} + e^{alpha b} - 1 gives
        // N_a = e^{alpha (a - N)}, hence N_ab = -alpha N_a N_b.
        return -alpha_ * dneg_log_da(a, b) * dneg_log_db(a, b);
      case Kind::Gumbel: {
        double ia = 1.0 / alpha_;
        double S = std::pow(a, ia) + std::pow(b, ia);
        return (alpha_ - 1.0) * ia * std::pow(S, alpha_ - 2.0) *
               std::pow(a * b, ia - 1.0);
      }
      case Kind::Plackett: {
        double u = std::exp(-a), v = std::exp(-b);
        double X = 1.0 + alpha_ * (u + v);
        double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
        double D = std::sqrt(std::max(D2, 1e-300));
        double Xa = -alpha_ * u, Xb = -alpha_ * v;
        double P = 2.0 * (alpha_ + 1.0) * v - X;
        double Q = 2.0 * (alpha_ + 1.0) * u - X;
        double Da = alpha_ * u * P / D, Db = alpha_ * v * Q / D;
        double Dab = -alpha_ * u * v * ((alpha_ + 2.0) * D2 + alpha_ * P * Q) /
                     (D * D2);
        if (alpha_ >= -0.5) {
          // N = a + b - log(2(alpha+1)) + log(X + D); X is linear in (u, v),
          // so X_ab = 0.
          double W = X + D;
          return (Dab * W - (Xa + Da) * (Xb + Db)) / (W * W);
        }
        // N = -log((X - D) / (2 alpha)).
        double W = X - D;
        return (Dab * W + (Xa - Da) * (Xb - Db)) / (W * W);
      }
      case Kind::Asymmetrized:
        return theta_ * delta_ * inner_->d2neg_log_dadb(theta_ * a, delta_ * b);
      case Kind::FrailtyMixed: {
        double pa = std::expm1(beta_ * a), pb = std::expm1(beta_ * b);
        double t = inner_->neg_log_impl(pa, pb);
        double Ma = inner_->dneg_log_da(pa, pb);
        double Mb = inner_->dneg_log_db(pa, pb);
        double Mab = inner_->d2neg_log_dadb(pa, pb);
        double opt = 1.0 + t;
        return beta_ * std::exp(beta_ * (a + b)) *
               (Mab / opt - Ma * Mb / (opt * opt));
      }
      case Kind::Survival: {
        double s = std::exp(-a), t = std::exp(-b);
        // With either coordinate deep in the tail the cdf factorizes linearly
        // in it and the mixed term vanishes to O(min(s, t)).
        if (std::min(s, t) < 1e-8) return 0.0;
        double sv = std::max(inner_->corner_survival(s, t), 1e-300);
        double x = clamp_unit(1.0 - s), y = clamp_unit(1.0 - t);
        double qs = 1.0 - inner_->partial_first(x, y);
        double qt = 1.0 - inner_->partial_second(x, y);
        double kxy = inner_->density_impl(x, y);
        return s * t * (qs * qt - kxy * sv) / (sv * sv);
      }
    }
    return 0.0;
  }

  // P(U > 1 - s, V > 1 - t) = s + t - 1 + C(1 - s, 1 - t), evaluated without
  // cancellation. Exact for all (s, t); switches to the corner expansion
  // kappa * s * t when both arguments are tiny.
  double corner_survival(double s, double t) const {
    s = std::clamp(s, 0.0, 1.0 - kUnitEps);
    t = std::clamp(t, 0.0, 1.0 - kUnitEps);
    if (std::max(s, t) < 1e-8) return corner_coefficient() * s * t;
    s = std::max(s, kUnitEps);
    t = std::max(t, kUnitEps);
    return s + t + std::expm1(log_cdf_near_one(s, t));
  }

  // log C(1 - s, 1 - t), stable for small s, t.
  double log_cdf_near_one(double s, double t) const {
    switch (kind_) {
      case Kind::Independence:
        return std::log1p(-s) + std::log1p(-t);
      case Kind::Clayton: {
        double gs = std::expm1(-alpha_ * std::log1p(-s));
        double gt = std::expm1(-alpha_ * std::log1p(-t));
        return -std::log1p(gs + gt) / alpha_;
      }
      case Kind::Gumbel: {
        double ia = 1.0 / alpha_;
        double ga = std::pow(-std::log1p(-s), ia);
        double gb = std::pow(-std::log1p(-t), ia);
        return -std::pow(ga + gb, alpha_);
      }
      case Kind::Asymmetrized: {
        double s2 = -std::expm1(theta_ * std::log1p(-s));
        double t2 = -std::expm1(delta_ * std::log1p(-t));
        return (1.0 - theta_) * std::log1p(-s) +
               (1.0 - delta_) * std::log1p(-t) +
               inner_->log_cdf_near_one(s2, t2);
      }
      default:
        return std::log(std::max(cdf_impl(1.0 - s, 1.0 - t), 1e-300));
    }
  }

  // Mixed second derivative of the cdf at (1, 1); the coefficient kappa in
  // P(U > 1-s, V > 1-t) ~ kappa * s * t. Only defined for corner-smooth
  // families (those without upper tail dependence).
  double corner_coefficient() const {
    switch (kind_) {
      case Kind::Independence:
        return 1.0;
      case Kind::Clayton:
      case Kind::Plackett:
        return 1.0 + alpha_;
      case Kind::Asymmetrized:
        return 1.0 - theta_ * delta_ +
               theta_ * delta_ * inner_->corner_coefficient();
      default:
        throw numeric_error(
            "corner_coefficient: upper corner of " + describe() +
            " is not smooth; deep-tail survival evaluation unsupported");
    }
  }

  // ---- family-specific helpers -------------------------------------------

  // (1/alpha) log(exp(alpha a) + exp(alpha b) - 1) without overflow.
  double clayton_neg_log(double a, double b) const {
    double m = std::max(a, b);
    double r = std::exp(-alpha_ * (m - a)) + std::exp(-alpha_ * (m - b)) -
               std::exp(-alpha_ * m);
    return m + std::log(r) / alpha_;
  }

  double gumbel_neg_log(double a, double b) const {
    double ia = 1.0 / alpha_;
    return std::pow(std::pow(a, ia) + std::pow(b, ia), alpha_);
  }

  double plackett_cdf_raw(double u, double v) const {
    double X = 1.0 + alpha_ * (u + v);
    double D2 = X * X - 4.0 * alpha_ * (alpha_ + 1.0) * u * v;
    double D = std::sqrt(std::max(D2, 0.0));
    if (alpha_ < -0.5) return (X - D) / (2.0 * alpha_);
    return 2.0 * (alpha_ + 1.0) * u * v / (X + D);
  }

  double frailty_phi(double u) const { return std::expm1(-beta_ * std::log(u)); }

  Kind kind_;
  double alpha_ = 0.0;
  double theta_ = 1.0;
  double delta_ = 1.0;
  double beta_ = 0.0;
  std::shared_ptr<const Copula> inner_;
};

// Base-family cdf helpers with the argument order used throughout: first the
// two coordinates, then the dependence parameter.
inline double clayton_cdf(double u, double v, double alpha) {
  return Copula::clayton(alpha).cdf(u, v);
}
inline double gumbel_cdf(double u, double v, double alpha) {
  return Copula::gumbel(alpha).cdf(u, v);
}
inline double plackett_cdf(double u, double v, double alpha) {
  return Copula::plackett(alpha).cdf(u, v);
}
inline double clayton_survival_cdf(double u, double v, double alpha) {
  return Copula::clayton_survival(alpha).cdf(u, v);
}

}  // namespace asymcop
