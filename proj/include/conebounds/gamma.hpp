#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace conebounds {

// gamma_d = E||g|| for g ~ N(0, I_d), equal to sqrt(2) * Gamma((d+1)/2) / Gamma(d/2).
//
// Evaluated through lgamma in extended precision so that the exact identity
// gamma_{d} * gamma_{d+1} = d survives in double to ~1e-12 relative even for
// d around 1e6, where a plain double lgamma difference loses too many digits.
inline double gamma_d(std::int64_t d) {
  if (d < 1) throw std::domain_error("gamma_d: dimension must be >= 1");
  const long double half_d = 0.5L * static_cast<long double>(d);
  const long double diff = lgammal(half_d + 0.5L) - lgammal(half_d);
  return static_cast<double>(sqrtl(2.0L) * expl(diff));
}

}  // namespace conebounds
