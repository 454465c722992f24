#pragma once

#include <cmath>

#include "asymcop/common.hpp"

namespace asymcop {

// Archimedean generator given through the Laplace transform of a positive
// mixing variable. phi_inverse is the Laplace transform itself, phi its
// functional inverse, so that C(u, v) = phi_inverse(phi(u) + phi(v)) is the
// induced copula.
enum class GeneratorKind {
  GammaLT,           // phi_inverse(t) = (1 + t)^(-1/param), Clayton-type
  PositiveStableLT,  // phi_inverse(t) = exp(-t^param), Gumbel-type
};

struct GeneratorSpec {
  GeneratorKind kind;
  double param;

  static GeneratorSpec gamma_lt(double param) {
    check(param, "GeneratorSpec::gamma_lt");
    return {GeneratorKind::GammaLT, param};
  }

  static GeneratorSpec positive_stable_lt(double param) {
    check(param, "GeneratorSpec::positive_stable_lt");
    if (param > 1.0)
      throw domain_error(
          "GeneratorSpec::positive_stable_lt: param must lie in (0, 1]");
    return {GeneratorKind::PositiveStableLT, param};
  }

  // phi_inverse: [0, inf) -> (0, 1], strictly decreasing, phi_inverse(0) = 1.
  double phi_inverse(double t) const {
    if (!(t >= 0.0))
      throw domain_error("GeneratorSpec::phi_inverse: t must be >= 0");
    switch (kind) {
      case GeneratorKind::GammaLT:
        return std::exp(-std::log1p(t) / param);
      case GeneratorKind::PositiveStableLT:
        return std::exp(-std::pow(t, param));
    }
    throw domain_error("GeneratorSpec::phi_inverse: unknown kind");
  }

  // phi: (0, 1] -> [0, inf), inverse of phi_inverse.
  double phi(double s) const {
    if (!(s > 0.0 && s <= 1.0))
      throw domain_error("GeneratorSpec::phi: s must lie in (0, 1]");
    switch (kind) {
      case GeneratorKind::GammaLT:
        return std::expm1(-param * std::log(s));
      case GeneratorKind::PositiveStableLT:
        return std::pow(-std::log(s), 1.0 / param);
    }
    throw domain_error("GeneratorSpec::phi: unknown kind");
  }

 private:
  static void check(double param, const char* who) {
    if (!(param > 0.0) || !std::isfinite(param))
      throw domain_error(std::string(who) + ": param must be positive");
  }
};

}  // namespace asymcop
