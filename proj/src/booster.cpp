#include "tada/booster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tada {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Edges are in [-1, 1] by construction; beyond this slack the arithmetic broke down.
constexpr double kEdgeSlack = 1e-9;
// Relative slack for comparing a 0/1 risk with a product of reals.
constexpr double kBoundSlack = 1e-9;

void require_boosting_range(const TemperConfig& cfg) {
  cfg.require_finite("boosting");
  if (cfg.t() < 0.0 || cfg.t() >= 2.0) {
    throw Error(ErrorCode::domain, "boosting needs t in [0, 2)");
  }
}

}  // namespace

Ensemble::Ensemble(TemperConfig cfg, std::size_t training_size)
    : cfg_(cfg), m_(training_size) {}

double Ensemble::clamp_level() const {
  if (cfg_.is_classic()) return kInf;
  if (cfg_.t() > 1.0) {
    throw Error(ErrorCode::domain, "clamped models are defined for t <= 1");
  }
  return 1.0 / cfg_.one_minus_t();
}

Prediction predict(const Ensemble& ens, const Dataset& data, std::size_t row, bool clamped) {
  if (ens.empty()) {
    throw Error(ErrorCode::invalid_argument, "predict: empty ensemble");
  }
  double score = 0.0;
  if (clamped) {
    if (ens.cfg().t() >= 1.0 || ens.cfg().is_classic()) {
      throw Error(ErrorCode::domain, "clamped prediction needs t < 1");
    }
    const double delta = ens.clamp_level();
    for (const auto& member : ens.members()) {
      score = std::max(std::min(score + member.alpha * member.h->predict(data, row), delta),
                       -delta);
    }
  } else {
    for (const auto& member : ens.members()) {
      score += member.alpha * member.h->predict(data, row);
    }
  }
  return {score, sign_label(score)};
}

ConfidenceBounds confidence_bounds(const TemWeights& q, std::span<const double> u) {
  if (q.size() != u.size()) {
    throw Error(ErrorCode::invalid_argument, "confidence_bounds: size mismatch");
  }
  const TemperConfig& cfg = q.cfg();
  const double k = cfg.one_minus_t();
  double r = 0.0;
  double dagger_max = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      r = std::max(r, std::abs(u[i]) / (cfg.is_classic() ? 1.0 : std::pow(q[i], k)));
    } else {
      dagger_max = std::max(dagger_max, std::abs(u[i]));
    }
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::degenerate_hypothesis,
                "confidence_bounds: every margin off the switched-off set is zero");
  }
  ConfidenceBounds out{r, 0.0};
  if (!q.dagger_set().empty()) {
    if (cfg.is_classic() || k <= 0.0) {
      throw Error(ErrorCode::domain, "switched-off weights only exist for t < 1");
    }
    out.q_dagger = std::pow(dagger_max / r, 1.0 / k);
  }
  return out;
}

double edge(const TemWeights& q, std::span<const double> u, double r, double q_dagger) {
  if (q.size() != u.size()) {
    throw Error(ErrorCode::invalid_argument, "edge: size mismatch");
  }
  if (!(r > 0.0)) {
    throw Error(ErrorCode::degenerate_hypothesis, "edge: R must be positive");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    sum += (q[i] > 0.0 ? q[i] : q_dagger) * u[i];
  }
  const double m_dagger = static_cast<double>(q.dagger_set().size());
  const double mass = m_dagger > 0.0 ? 1.0 + m_dagger * std::pow(q_dagger, 2.0 - q.cfg().t())
                                     : 1.0;
  return sum / (mass * r);
}

Leveraging leveraging(double rho, double r, const TemperConfig& cfg, double z_product,
                      std::size_t m) {
  require_boosting_range(cfg);
  if (!(r > 0.0)) {
    throw Error(ErrorCode::degenerate_hypothesis, "leveraging: R must be positive");
  }
  if (!(std::abs(rho) <= 1.0 - kEdgeCap)) {
    throw Error(ErrorCode::edge_saturated,
                "leveraging: |rho| = " + std::to_string(std::abs(rho)) + " is saturated");
  }
  if (!(z_product > 0.0) || m == 0) {
    throw Error(ErrorCode::invalid_argument, "leveraging: need Z product > 0 and m >= 1");
  }
  if (cfg.is_classic()) {
    const double mu = 0.5 * std::log((1.0 + rho) / (1.0 - rho)) / r;
    return {mu, mu};
  }
  const double k = cfg.one_minus_t();
  const double mean = power_mean(1.0 - rho, 1.0 + rho, k);
  const double mu = -log_t((1.0 - rho) / mean, cfg) / r;
  const double alpha =
      std::pow(static_cast<double>(m), 1.0 - cfg.t_star()) * std::pow(z_product, k) * mu;
  return {mu, alpha};
}

double kt_bound(double rho, const TemperConfig& cfg) {
  cfg.require_finite("kt_bound");
  if (!(std::abs(rho) <= 1.0)) {
    throw Error(ErrorCode::domain, "kt_bound needs |rho| <= 1");
  }
  if (cfg.is_classic()) return std::sqrt((1.0 - rho) * (1.0 + rho));
  if (std::abs(rho) == 1.0) {
    // 0/0 for t > 1: the power mean vanishes at the same rate as 1 - rho^2.
    return cfg.t() < 1.0 ? 0.0 : std::exp2(1.0 + 1.0 / cfg.one_minus_t());
  }
  return (1.0 - rho) * (1.0 + rho) / power_mean(1.0 - rho, 1.0 + rho, cfg.one_minus_t());
}

double tempered_exp_loss(std::span<const double> margins, const TemperConfig& cfg) {
  if (margins.empty()) {
    throw Error(ErrorCode::invalid_argument, "tempered_exp_loss: no margins");
  }
  const double e = 2.0 - cfg.t();
  double acc = 0.0;
  for (const double z : margins) acc += std::pow(exp_t(-z, cfg), e);
  return acc / static_cast<double>(margins.size());
}

BoostResult boost(const Dataset& train, WeakLearner& learner, const TemperConfig& cfg,
                  const BoostOptions& options) {
  require_boosting_range(cfg);
  if (options.iterations == 0) {
    throw Error(ErrorCode::invalid_argument, "boost: need at least one iteration");
  }
  const std::size_t m = train.size();
  if (m == 0) throw Error(ErrorCode::invalid_argument, "boost: empty training set");
  for (const int y : train.labels()) {
    if (y != 1 && y != -1) throw Error(ErrorCode::invalid_argument, "labels must be +/-1");
  }

  TemWeights q = options.initial_weights ? *options.initial_weights : uniform_init(m, cfg);
  if (q.size() != m || q.cfg().t() != cfg.t()) {
    throw Error(ErrorCode::invalid_argument, "boost: initial weights do not match");
  }

  BoostResult result{Ensemble(cfg, m), {}, q, std::nullopt, {}, {}};
  const double two_minus_t = 2.0 - cfg.t();
  double z_product = 1.0;
  std::vector<double> u(m);

  for (std::size_t j = 0; j < options.iterations; ++j) {
    try {
      HypothesisPtr h = learner.fit(train, q);
      for (std::size_t i = 0; i < m; ++i) {
        u[i] = train.label(i) * h->predict(train, i);
        if (!std::isfinite(u[i])) {
          throw Error(ErrorCode::degenerate_hypothesis, "weak hypothesis is not finite");
        }
      }

      IterationRecord rec;
      const ConfidenceBounds cb = confidence_bounds(q, u);
      rec.r = cb.r;
      rec.q_dagger = cb.q_dagger;
      rec.m_dagger = q.dagger_set().size();
      rec.rho = edge(q, u, cb.r, cb.q_dagger);
      if (!(std::abs(rec.rho) <= 1.0 + kEdgeSlack)) {
        throw Error(ErrorCode::edge_saturated, "edge left [-1, 1]: " + std::to_string(rec.rho));
      }
      const double rho = std::clamp(rec.rho, -1.0 + kEdgeCap, 1.0 - kEdgeCap);
      const Leveraging lev = leveraging(rho, cb.r, cfg, z_product, m);
      rec.mu = lev.mu;
      rec.alpha = lev.alpha;
      rec.bound_factor =
          (1.0 + static_cast<double>(rec.m_dagger) * std::pow(cb.q_dagger, two_minus_t)) *
          kt_bound(rho, cfg);

      UpdateResult next = tempered_update(q, u, lev.mu);
      rec.z = next.z;
      const CoDensity p = co_density(next.q);
      const auto [lo, hi] = std::minmax_element(p.p.begin(), p.p.end());
      rec.min_codensity = *lo;
      rec.max_codensity = *hi;
      if (cfg.t() >= 1.0 || cfg.is_classic()) {
        rec.infinite_weight_count = next.q.dagger_set().size();
      }

      z_product *= next.z;
      result.ensemble.add({std::move(h), lev.mu, lev.alpha, next.z});
      result.trace.push_back(rec);
      if (options.record_vectors) {
        result.weights.emplace_back(next.q.values().begin(), next.q.values().end());
        result.margins.push_back(u);
      }
      q = std::move(next.q);
    } catch (const Error& e) {
      result.stopped = e;
      break;
    }
  }
  result.final_weights = q;
  return result;
}

RiskBoundCheck check_risk_bound(const Dataset& train, const BoostResult& result) {
  RiskBoundCheck out;
  const Ensemble& ens = result.ensemble;
  const TemperConfig& cfg = ens.cfg();
  const bool clamped = cfg.t() < 1.0 && !cfg.is_classic();
  out.train_error_clamped = clamped ? 0.0 : kNaN;
  if (ens.empty()) return out;

  const std::size_t m = train.size();
  std::size_t wrong = 0;
  std::size_t wrong_clamped = 0;
  for (std::size_t i = 0; i < m; ++i) {
    wrong += predict(ens, train, i, false).label != train.label(i);
    if (clamped) wrong_clamped += predict(ens, train, i, true).label != train.label(i);
  }
  out.train_error = static_cast<double>(wrong) / static_cast<double>(m);
  if (clamped) out.train_error_clamped = static_cast<double>(wrong_clamped) / static_cast<double>(m);

  for (const auto& rec : result.trace) {
    out.z_product *= std::pow(rec.z, 2.0 - cfg.t());
    out.bound_product *= rec.bound_factor;
  }
  const double z_cap = out.z_product * (1.0 + kBoundSlack);
  out.holds = out.train_error <= z_cap &&
              (!clamped || out.train_error_clamped <= z_cap) &&
              out.z_product <= out.bound_product * (1.0 + kBoundSlack);
  return out;
}

}  // namespace tada
