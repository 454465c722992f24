#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "asymcop/common.hpp"

namespace asymcop {

// Deterministic random source. One instance is created per sampling call so
// identical seeds reproduce identical output; sub-streams are derived through
// split() rather than shared global state. Variates are generated explicitly
// (not via std:: distributions) so streams do not depend on the standard
// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Uniform on the open interval (0, 1).
  double uniform() {
    for (;;) {
      double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0 && u < 1.0) return u;
    }
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    for (;;) {
      double x = 2.0 * uniform() - 1.0;
      double y = 2.0 * uniform() - 1.0;
      double s = x * x + y * y;
      if (s > 0.0 && s < 1.0) {
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = y * m;
        have_spare_ = true;
        return x * m;
      }
    }
  }

  // Gamma(shape, scale 1) by Marsaglia-Tsang rejection; shapes below one use
  // the boost relation Gamma(a) = Gamma(a + 1) * U^(1/a).
  double gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
      throw domain_error("Rng::gamma: shape must be positive and finite");
    if (shape < 1.0) {
      double boost = std::pow(uniform(), 1.0 / shape);
      return gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Derived generator with an independent deterministic stream.
  Rng split(std::uint64_t stream) {
    return Rng(mix(engine_() ^ (0x9e3779b97f4a7c15ull * (stream + 1))));
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace asymcop
