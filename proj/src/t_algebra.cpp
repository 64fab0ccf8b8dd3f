#include "tada/t_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/power_mean.hpp"
#include "tada/errors.hpp"

namespace tada {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TemperConfig::TemperConfig(double t) : t_(t) {
  if (std::isnan(t) || t == kInf) {
    throw Error(ErrorCode::domain, "temperature must be a real number or -inf");
  }
  if (t == -kInf) {
    neg_inf_ = true;
    return;
  }
  if (t == 2.0) {
    throw Error(ErrorCode::domain, "temperature t = 2 is excluded");
  }
  classic_ = std::abs(t - 1.0) < kClassicTolerance;
}

TemperConfig TemperConfig::negative_infinity() { return TemperConfig(-kInf); }

double TemperConfig::t_star() const noexcept {
  return neg_inf_ ? 0.0 : 1.0 / (2.0 - t_);
}

void TemperConfig::require_finite(const char* what) const {
  if (neg_inf_) {
    throw Error(ErrorCode::domain, std::string(what) + " needs a finite temperature");
  }
}

double log_t(double z, const TemperConfig& cfg) {
  cfg.require_finite("log_t");
  if (!(z > 0.0)) {
    throw Error(ErrorCode::domain, "log_t needs z > 0");
  }
  if (cfg.is_classic()) return std::log(z);
  const double k = cfg.one_minus_t();
  return std::expm1(k * std::log(z)) / k;
}

double exp_t(double z, const TemperConfig& cfg) {
  cfg.require_finite("exp_t");
  if (cfg.is_classic()) return std::exp(z);
  const double k = cfg.one_minus_t();
  const double x = k * z;
  if (x <= -1.0) {
    return k > 0.0 ? 0.0 : kInf;
  }
  return std::exp(std::log1p(x) / k);
}

double t_product(double a, double b, const TemperConfig& cfg) {
  cfg.require_finite("t_product");
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw Error(ErrorCode::domain, "t_product needs nonnegative arguments");
  }
  if (cfg.is_classic()) return a * b;
  const double k = cfg.one_minus_t();
  if (a == 0.0 || b == 0.0) {
    // t > 1: 0^{1-t} = inf, so the bracket is +inf and the result is 0.
    if (k < 0.0) return 0.0;
  }
  // a (x)_t b = exp_t(log_t a + log_t b), with log_t(0) = -1/(1-t) for t < 1.
  const double la = a == 0.0 ? -1.0 / k : log_t(a, cfg);
  const double lb = b == 0.0 ? -1.0 / k : log_t(b, cfg);
  return exp_t(la + lb, cfg);
}

double t_minus(double a, double b, const TemperConfig& cfg) {
  cfg.require_finite("t_minus");
  const double denom = 1.0 + cfg.one_minus_t() * b;
  if (denom == 0.0) {
    throw Error(ErrorCode::domain, "t_minus: 1 + (1-t) b is zero");
  }
  return (a - b) / denom;
}

double power_mean(double a, double b, double q) {
  if (!(a >= 0.0) || !(b >= 0.0) || std::isnan(q)) {
    throw Error(ErrorCode::domain, "power_mean needs nonnegative arguments");
  }
  return detail::power_mean(a, b, q, TemperConfig::kClassicTolerance);
}

double clamped_sum(std::span<const double> values, double delta, ClampMode mode) {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::domain, "clamped_sum needs delta >= 0");
  }
  double acc = 0.0;
  for (const double v : values) {
    acc += v;
    switch (mode) {
      case ClampMode::upper: acc = std::min(acc, delta); break;
      case ClampMode::lower: acc = std::max(acc, -delta); break;
      case ClampMode::two_sided: acc = std::max(std::min(acc, delta), -delta); break;
    }
  }
  return acc;
}

}  // namespace tada
