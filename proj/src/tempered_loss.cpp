#include "tada/tempered_loss.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>

#include "detail/power_mean.hpp"
#include "tada/errors.hpp"

namespace tada {

namespace {

template <std::floating_point T>
struct Temper {
  T t;
  bool neg_inf;
  // 1 - t, forced to exactly 0 in the classical band.
  T q;
};

template <std::floating_point T>
Temper<T> temper_of(const TemperConfig& cfg) {
  if (cfg.is_negative_infinity()) return {T(0), true, T(0)};
  return {T(cfg.t()), false, cfg.is_classic() ? T(0) : T(1) - T(cfg.t())};
}

template <std::floating_point T>
T mean(T a, T b, T q) {
  return detail::power_mean(a, b, q, T(TemperConfig::kClassicTolerance));
}

// 2^{(2-t)/(1-t)}: value at the saturated endpoints when 1 - t < 0.
template <std::floating_point T>
T endpoint_value(const Temper<T>& tp) {
  return std::exp2((T(1) + tp.q) / tp.q);
}

template <std::floating_point T>
T partial_pos(T u, const Temper<T>& tp) {
  if (!(u >= T(0) && u <= T(1))) {
    throw Error(ErrorCode::domain, "partial loss needs u in [0, 1]");
  }
  // pointwise limit: every finite t gives 1 at u = 1/2
  if (tp.neg_inf) return u < T(0.5) ? T(2) : (u == T(0.5) ? T(1) : T(0));
  if (u == T(1)) return tp.q >= T(0) ? T(0) : endpoint_value(tp);
  if (u == T(0)) {
    return tp.q > T(0) ? endpoint_value(tp) : std::numeric_limits<T>::infinity();
  }
  const T ratio = (T(1) - u) / mean(u, T(1) - u, tp.q);
  return std::pow(ratio, T(1) + tp.q);
}

template <std::floating_point T>
T risk(T u, T v, const Temper<T>& tp) {
  if (!(v >= T(0) && v <= T(1))) {
    throw Error(ErrorCode::domain, "pointwise risk needs v in [0, 1]");
  }
  T acc = 0;
  if (v > T(0)) acc += v * partial_pos(u, tp);
  if (v < T(1)) acc += (T(1) - v) * partial_pos(T(1) - u, tp);
  return acc;
}

template <std::floating_point T>
T bayes(T v, const Temper<T>& tp) {
  if (!(v >= T(0) && v <= T(1))) {
    throw Error(ErrorCode::domain, "Bayes risk needs v in [0, 1]");
  }
  if (tp.neg_inf) return T(2) * std::min(v, T(1) - v);
  if (v == T(0) || v == T(1)) return tp.q >= T(0) ? T(0) : endpoint_value(tp);
  return T(2) * v * (T(1) - v) / mean(v, T(1) - v, tp.q);
}

// Bayes risk as a function of a raw temperature, including t = 2 (harmonic
// mean, constant 1 on the open interval).
double bayes_at(double v, double t) {
  if (t == 2.0) return 1.0;
  if (t == -std::numeric_limits<double>::infinity()) return 2.0 * std::min(v, 1.0 - v);
  return bayes_risk(v, TemperConfig(t));
}

}  // namespace

double partial_loss_pos(double u, const TemperConfig& cfg) {
  return partial_pos(u, temper_of<double>(cfg));
}

double partial_loss_neg(double u, const TemperConfig& cfg) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::domain, "partial loss needs u in [0, 1]");
  }
  return partial_pos(1.0 - u, temper_of<double>(cfg));
}

double pointwise_risk(double u, double v, const TemperConfig& cfg) {
  return risk(u, v, temper_of<double>(cfg));
}

double bayes_risk(double v, const TemperConfig& cfg) {
  return bayes(v, temper_of<double>(cfg));
}

CpeLoss::CpeLoss(TemperConfig cfg) : cfg_(cfg) {}

ProperReport check_strict_properness(const TemperConfig& cfg, std::span<const double> v_grid,
                                     std::span<const double> u_grid) {
  using L = long double;
  if (u_grid.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "properness check needs at least two u values");
  }
  const auto tp = temper_of<L>(cfg);
  const auto [gmin, gmax] = std::minmax_element(u_grid.begin(), u_grid.end());
  const double step = (*gmax - *gmin) / static_cast<double>(u_grid.size() - 1);

  ProperReport report;
  report.strict_checked = !tp.neg_inf;
  std::vector<L> r(u_grid.size());
  for (const double v : v_grid) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      r[k] = risk<L>(u_grid[k], v, tp);
      if (r[k] < r[best]) best = k;
    }
    const L rmin = r[best];
    if (tp.neg_inf) {
      const L at_v = risk<L>(v, v, tp);
      if (at_v > rmin + L(1e-12) * std::max(L(1), rmin)) {
        report.violations.push_back({v, u_grid[best], true});
      }
      continue;
    }
    if (std::abs(u_grid[best] - v) > step * (1.0 + 1e-9)) {
      report.violations.push_back({v, u_grid[best], true});
      continue;
    }
    const L eps = 16 * std::numeric_limits<L>::epsilon() * std::max(rmin, L(1e-300));
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      const std::size_t gap = k > best ? k - best : best - k;
      if (gap > 3 && r[k] <= rmin + eps) {
        report.violations.push_back({v, u_grid[k], false});
        break;
      }
    }
  }
  return report;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::invalid_argument, "make_grid needs lo <= hi and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) grid[k] = lo + static_cast<double>(k) * step;
  grid[n] = std::min(grid[n], hi);
  return grid;
}

double bayes_risk_coverage(double u, double z) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::domain, "coverage needs u in (0, 1)");
  }
  const double lower = 2.0 * std::min(u, 1.0 - u);
  if (!(z >= lower - 1e-12 && z <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::domain, "z is outside [2 min(u, 1-u), 1]");
  }
  if (z <= lower) return -std::numeric_limits<double>::infinity();
  if (z >= 1.0) return 2.0;

  double lo = 0.0;
  while (bayes_at(u, lo) > z) {
    lo = lo == 0.0 ? -1.0 : 2.0 * lo;
    if (lo < -1e300) return -std::numeric_limits<double>::infinity();
  }
  double hi = 2.0;
  double mid = lo;
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double f = bayes_at(u, mid);
    if (std::abs(f - z) <= 1e-13) break;
    if (f < z) lo = mid; else hi = mid;
  }
  return mid;
}

}  // namespace tada
