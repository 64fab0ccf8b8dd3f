#pragma once

// Scalar kernel of tempered arithmetic: deformed logarithm/exponential,
// the associated product and difference, power means and order-sensitive
// clamped summation. Everything here is a pure function.

#include <span>

namespace tada {

/// Temperature of the tempered family. Holds either a finite t != 2 or the
/// distinct "t = -infinity" variant used by the CPE loss family.
class TemperConfig {
 public:
  /// |t - 1| below this dispatches to the exact classical forms.
  static constexpr double kClassicTolerance = 1e-9;

  /// Passing -infinity yields the negative-infinity variant. NaN, +inf and
  /// t == 2 are rejected.
  explicit TemperConfig(double t);

  static TemperConfig negative_infinity();

  bool is_negative_infinity() const noexcept { return neg_inf_; }
  bool is_classic() const noexcept { return classic_; }

  /// The temperature; -infinity for the negative-infinity variant.
  double t() const noexcept { return t_; }
  double one_minus_t() const noexcept { return 1.0 - t_; }
  /// t* = 1 / (2 - t); 0 in the negative-infinity limit.
  double t_star() const noexcept;

  /// Throws unless the temperature is finite.
  void require_finite(const char* what) const;

 private:
  double t_;
  bool neg_inf_ = false;
  bool classic_ = false;
};

/// log_t(z) = (z^{1-t} - 1)/(1 - t); natural log in the classical case.
double log_t(double z, const TemperConfig& cfg);

/// exp_t(z) = [1 + (1-t) z]_+^{1/(1-t)}. For t > 1 the singular branch
/// returns +infinity, which callers treat as a sentinel.
double exp_t(double z, const TemperConfig& cfg);

/// a (x)_t b = [a^{1-t} + b^{1-t} - 1]_+^{1/(1-t)}.
double t_product(double a, double b, const TemperConfig& cfg);

/// a (-)_t b = (a - b) / (1 + (1-t) b).
double t_minus(double a, double b, const TemperConfig& cfg);

/// q-power mean ((a^q + b^q)/2)^{1/q} with its limits at q = 0 (geometric)
/// and q = +/-infinity (max/min).
double power_mean(double a, double b, double q);

enum class ClampMode { upper, lower, two_sided };

/// Left fold of `values` where the running sum is clamped after each addend:
/// at +delta (upper), at -delta (lower) or both (two_sided). Order matters.
double clamped_sum(std::span<const double> values, double delta, ClampMode mode);

}  // namespace tada
