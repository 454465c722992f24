#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace asymcop {

// Inputs to cdf evaluation are clamped into [kUnitEps, 1 - kUnitEps] before
// any log/power transform; density and conditional evaluation instead reject
// boundary arguments.
inline constexpr double kUnitEps = 1e-12;

// Parameters within this distance of a structural limit point (alpha = 0 for
// Plackett/Clayton, alpha = 1 for Gumbel) are treated as exact independence.
inline constexpr double kLimitEps = 1e-10;

class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double clamp_unit(double u) {
  if (std::isnan(u)) throw numeric_error("clamp_unit: NaN input");
  if (u < kUnitEps) return kUnitEps;
  if (u > 1.0 - kUnitEps) return 1.0 - kUnitEps;
  return u;
}

inline bool interior(double u) { return u > 0.0 && u < 1.0; }

inline void require_interior(double u, double v, const char* who) {
  if (!interior(u) || !interior(v)) {
    std::ostringstream os;
    os << who << ": argument outside the open unit square, (u, v) = (" << u
       << ", " << v << ")";
    throw domain_error(os.str());
  }
}

template <typename... Ts>
[[noreturn]] inline void throw_numeric(const char* who, Ts... context) {
  std::ostringstream os;
  os << who << ": non-finite result";
  ((os << " " << context), ...);
  throw numeric_error(os.str());
}

inline double require_finite(double x, const char* who, double u, double v) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << who << ": non-finite value at (u, v) = (" << u << ", " << v << ")";
    throw numeric_error(os.str());
  }
  return x;
}

}  // namespace asymcop
