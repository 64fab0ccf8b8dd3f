#include "tada/tem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tada/errors.hpp"

namespace tada {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisections = 200;
constexpr int kMaxBracketDoublings = 2000;
constexpr double kRootTolerance = 1e-12;

void require_boosting_temperature(const TemperConfig& cfg) {
  cfg.require_finite("tempered weights");
  if (!(cfg.t() < 2.0)) {
    throw Error(ErrorCode::domain, "tempered weights need t < 2");
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + ": size mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}

// log_t of a weight, extending log_t(0) = -1/(1-t) for t < 1.
double weight_log(double qi, const TemperConfig& cfg) {
  if (qi > 0.0) return log_t(qi, cfg);
  if (!cfg.is_classic() && cfg.t() < 1.0) return -1.0 / cfg.one_minus_t();
  throw Error(ErrorCode::domain, "a zero weight cannot be revived for t >= 1");
}

// (sum w^{2-t})^{1/(2-t)} computed with the largest entry factored out.
double co_norm(std::span<const double> w, double two_minus_t) {
  double hi = 0.0;
  for (const double x : w) hi = std::max(hi, x);
  if (hi == 0.0) return 0.0;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (const double x : w) {
    if (x > 0.0) acc += std::pow(x / hi, two_minus_t);
  }
  return hi * std::pow(acc, 1.0 / two_minus_t);
}

double power_sum(std::span<const double> q, double two_minus_t) {
  double acc = 0.0;
  for (const double x : q) {
    if (x > 0.0) acc += std::pow(x, two_minus_t);
  }
  return acc;
}

}  // namespace

TemWeights::TemWeights(std::vector<double> q, TemperConfig cfg)
    : q_(std::move(q)), cfg_(cfg) {
  require_boosting_temperature(cfg_);
  if (q_.empty()) {
    throw Error(ErrorCode::invalid_argument, "tempered weights need m >= 1");
  }
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (!(q_[i] >= 0.0) || !std::isfinite(q_[i])) {
      throw Error(ErrorCode::domain, "tempered weights must be finite and nonnegative");
    }
    if (q_[i] == 0.0) dagger_.push_back(i);
  }
  if (co_simplex_residual() > kCoSimplexTolerance) {
    throw Error(ErrorCode::domain, "weights are not on the co-simplex");
  }
}

double TemWeights::co_simplex_residual() const {
  return std::abs(power_sum(q_, 2.0 - cfg_.t()) - 1.0);
}

TemWeights uniform_init(std::size_t m, const TemperConfig& cfg) {
  if (m == 0) {
    throw Error(ErrorCode::invalid_argument, "uniform_init needs m >= 1");
  }
  require_boosting_temperature(cfg);
  const double qi = std::pow(static_cast<double>(m), -cfg.t_star());
  return TemWeights(std::vector<double>(m, qi), cfg);
}

CoDensity co_density(const TemWeights& q) {
  const double e = 2.0 - q.cfg().t();
  CoDensity out;
  out.p.reserve(q.size());
  for (const double x : q.values()) out.p.push_back(x > 0.0 ? std::pow(x, e) : 0.0);
  return out;
}

double tempered_relative_entropy(const TemWeights& q_new, const TemWeights& q_old) {
  require_same_size(q_new.size(), q_old.size(), "tempered_relative_entropy");
  if (q_new.cfg().t() != q_old.cfg().t()) {
    throw Error(ErrorCode::invalid_argument, "tempered_relative_entropy: temperatures differ");
  }
  const TemperConfig& cfg = q_old.cfg();
  const TemperConfig lower(cfg.t() - 1.0);
  // log_{t-1}(0) = -1/(2-t), finite since t < 2.
  const double log_lower_zero = -1.0 / (2.0 - cfg.t());
  double d = 0.0;
  for (std::size_t i = 0; i < q_old.size(); ++i) {
    const double a = q_new[i];
    const double b = q_old[i];
    if (!(b > 0.0)) {
      throw Error(ErrorCode::domain, "tempered_relative_entropy: reference weight is zero");
    }
    const double lb = log_t(b, cfg);
    if (a > 0.0) {
      d += a * (log_t(a, cfg) - lb) - log_t(a, lower) + log_t(b, lower);
    } else {
      d += -log_lower_zero + log_t(b, lower);
    }
  }
  return std::max(d, 0.0);
}

UnnormalizedUpdate unnormalized_update(const TemWeights& q, std::span<const double> u,
                                       double mu) {
  require_same_size(q.size(), u.size(), "tempered update");
  const TemperConfig& cfg = q.cfg();
  UnnormalizedUpdate out;
  out.w.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = exp_t(weight_log(q[i], cfg) - mu * u[i], cfg);
    if (w == kInf) ++out.infinite_count;
    out.w[i] = w;
  }
  return out;
}

double normalizer(const TemWeights& q, std::span<const double> u, double mu) {
  const UnnormalizedUpdate up = unnormalized_update(q, u, mu);
  if (up.infinite_count > 0) return kInf;
  return co_norm(up.w, 2.0 - q.cfg().t());
}

UpdateResult tempered_update(const TemWeights& q, std::span<const double> u, double mu) {
  UnnormalizedUpdate up = unnormalized_update(q, u, mu);
  if (up.infinite_count > 0) {
    throw Error(ErrorCode::overflow, std::to_string(up.infinite_count) +
                                         " weight(s) hit the infinite sentinel");
  }
  const double z = co_norm(up.w, 2.0 - q.cfg().t());
  if (z == 0.0) {
    throw Error(ErrorCode::all_zero, "every weight vanished before normalization");
  }
  for (double& w : up.w) w /= z;
  return {TemWeights(std::move(up.w), q.cfg()), z};
}

Projection solve_projection(const TemWeights& q, std::span<const double> u) {
  require_same_size(q.size(), u.size(), "solve_projection");
  const TemperConfig& cfg = q.cfg();
  const double t = cfg.t();

  double u_inf = 0.0;
  for (const double x : u) u_inf = std::max(u_inf, std::abs(x));
  if (u_inf == 0.0) {
    throw Error(ErrorCode::no_mixed_signs, "solve_projection: u is zero");
  }

  if (t == 0.0) {
    const double qu = std::inner_product(q.values().begin(), q.values().end(), u.begin(), 0.0);
    const double uu = std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
    // ||q||_2 = 1 on the t = 0 co-simplex.
    if (std::abs(qu) >= (1.0 - 1e-12) * std::sqrt(uu)) {
      throw Error(ErrorCode::collinear, "solve_projection: u is collinear with q at t = 0");
    }
  }

  bool has_pos = false;
  bool has_neg = false;
  double r = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      has_pos = has_pos || u[i] > 0.0;
      has_neg = has_neg || u[i] < 0.0;
      r = std::max(r, std::abs(u[i]) / std::pow(q[i], 1.0 - t));
    }
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::no_mixed_signs,
                "solve_projection: u needs mixed signs on the support of q");
  }

  // Sign of q'(mu)^T u; the unnormalized vector has the same sign. The
  // function is decreasing in mu and crosses zero at the minimizer of Z_t.
  auto edge_at = [&](double mu) {
    const UnnormalizedUpdate up = unnormalized_update(q, u, mu);
    if (up.infinite_count > 0) {
      // Only components with mu u_i < 0 blow up, so they share a sign.
      return mu > 0.0 ? -kInf : kInf;
    }
    const double z = co_norm(up.w, 2.0 - t);
    double g = 0.0;
    for (std::size_t i = 0; i < up.w.size(); ++i) g += (up.w[i] / z) * u[i];
    return g;
  };

  const double bound = cfg.is_classic() ? 1.0 / r : 1.0 / (r * std::abs(1.0 - t)) + 1.0;
  double lo = -bound;
  double hi = bound;
  for (int k = 0; edge_at(hi) > 0.0; ++k) {
    if (k == kMaxBracketDoublings || !std::isfinite(hi)) {
      throw Error(ErrorCode::no_mixed_signs, "solve_projection: no root above");
    }
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; edge_at(lo) < 0.0; ++k) {
    if (k == kMaxBracketDoublings || !std::isfinite(lo)) {
      throw Error(ErrorCode::no_mixed_signs, "solve_projection: no root below");
    }
    hi = lo;
    lo *= 2.0;
  }

  double mu = 0.5 * (lo + hi);
  int it = 0;
  for (; it < kMaxBisections; ++it) {
    mu = 0.5 * (lo + hi);
    if (mu <= lo || mu >= hi) break;
    const double g = edge_at(mu);
    if (std::abs(g) <= kRootTolerance * u_inf) break;
    (g > 0.0 ? lo : hi) = mu;
  }
  UpdateResult up = tempered_update(q, u, mu);
  return {mu, std::move(up.q), up.z, it};
}

}  // namespace tada
