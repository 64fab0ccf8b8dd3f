#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>

namespace tada::detail {

// Shared by the double API and the extended-precision properness scan.
// Arguments are assumed nonnegative and q not NaN.
template <std::floating_point T>
T power_mean(T a, T b, T q, T zero_tolerance) {
  constexpr T inf = std::numeric_limits<T>::infinity();
  if (a == b) return a;
  const T lo = std::min(a, b);
  const T hi = std::max(a, b);
  if (q == inf) return hi;
  if (q == -inf) return lo;
  if (std::abs(q) < zero_tolerance) return std::sqrt(a * b);
  if (lo == T(0)) {
    return q < T(0) ? T(0) : hi * std::exp2(T(-1) / q);
  }
  // Factor out the argument whose power dominates so that the remaining
  // ratio^q lies in [0, 1]; log1p/expm1 keep small |q| accurate.
  const T base = q > T(0) ? hi : lo;
  const T log_ratio = q > T(0) ? std::log(lo / hi) : std::log(hi / lo);
  const T s = std::expm1(q * log_ratio);
  return base * std::exp(std::log1p(T(0.5) * s) / q);
}

}  // namespace tada::detail
