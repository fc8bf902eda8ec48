#pragma once

// zeta(s) by brute force: 10^7 terms summed smallest first in long double,
// plus the midpoint-rule remainder int_{K+1/2}^inf x^{-s} dx.

#include <cmath>
#include <cstdint>

namespace oracle {

inline double brute_zeta(double s, std::int64_t terms = 10'000'000) {
  long double acc = 0.0L;
  for (std::int64_t k = terms; k >= 1; --k) acc += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
  acc += std::pow(static_cast<long double>(terms) + 0.5L, 1.0L - s) / (s - 1.0L);
  return static_cast<double>(acc);
}

inline double brute_c_gamma(double g) { return 0.5 / brute_zeta(1.0 + g); }

}  // namespace oracle
