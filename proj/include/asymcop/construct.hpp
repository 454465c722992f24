#pragma once

#include <cmath>
#include <memory>

#include "asymcop/common.hpp"
#include "asymcop/copula.hpp"
#include "asymcop/generators.hpp"

namespace asymcop {

// Two-exponent asymmetrization
//   C(u, v) = u^(1-theta) v^(1-delta) K(u^theta, v^delta),
// a valid copula for any base K and theta, delta in [0, 1]. theta = delta = 1
// returns the base object itself so nested model ladders stay exactly nested.
inline Copula asymmetrize(const Copula& base, double theta, double delta) {
  if (!(theta >= 0.0 && theta <= 1.0) || !(delta >= 0.0 && delta <= 1.0))
    throw domain_error("asymmetrize: theta, delta must lie in [0, 1]");
  if (theta == 1.0 && delta == 1.0) return base;
  Copula c(Copula::Kind::Asymmetrized);
  c.theta_ = theta;
  c.delta_ = delta;
  c.inner_ = std::make_shared<const Copula>(base);
  return c;
}

// One-exponent form C(u, v) = v^(1-delta) K(u, v^delta).
inline Copula asymmetrize_one_sided(const Copula& base, double delta) {
  return asymmetrize(base, 1.0, delta);
}

// Survival reflection C(u, v) = u + v - 1 + K(1-u, 1-v). Applying it twice
// returns the original model.
inline Copula survival_reflect(const Copula& base) {
  if (base.kind_ == Copula::Kind::Survival) return *base.inner_;
  if (base.kind_ == Copula::Kind::Independence) return base;
  Copula c(Copula::Kind::Survival);
  c.inner_ = std::make_shared<const Copula>(base);
  return c;
}

// Upper-tail-preserving asymmetrization of the Clayton survival model: the
// Khoudraji exponents act on the survival scale, i.e. on (1-u, 1-v) rather
// than (u, v), so the construction keeps its upper tail dependence.
inline Copula asymmetrize_survival_clayton(double alpha, double theta,
                                           double delta) {
  return survival_reflect(asymmetrize(Copula::clayton(alpha), theta, delta));
}

// Gamma-frailty mixture (minimum dependence layer)
//   C(u, v) = phi_inv(-log K(exp(-phi(u)), exp(-phi(v)))),
// with phi(s) = s^(-beta) - 1 and phi_inv(t) = (1 + t)^(-1/beta). beta = 0 is
// the structural identity and returns the inner model object, which keeps
// likelihood-ratio ladders exactly nested. For max-stable inner models
// (Gumbel-type and independence) the beta -> 0+ limit of the formula is the
// inner model itself; for other inners the formula tends to the inner's
// extreme-value attractor instead, which is why the identity is structural.
inline Copula frailty_mix(const Copula& inner, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw domain_error("frailty_mix: beta must be finite and >= 0");
  if (beta == 0.0) return inner;
  Copula c(Copula::Kind::FrailtyMixed);
  c.beta_ = beta;
  c.inner_ = std::make_shared<const Copula>(inner);
  return c;
}

// Frailty mixture written through the generator spec; only the Gamma Laplace
// transform induces the closed-form family above.
inline Copula frailty_mix(const Copula& inner, const GeneratorSpec& gen) {
  if (gen.kind != GeneratorKind::GammaLT)
    throw domain_error("frailty_mix: only the Gamma Laplace transform "
                       "generator is supported");
  return frailty_mix(inner, gen.param);
}

}  // namespace asymcop
