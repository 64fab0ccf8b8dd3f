#pragma once

// Tempered boosting: the outer loop that maintains tempered weights over the
// training sample, computes edges and closed-form coefficients, and
// assembles linear and progressively clamped ensembles.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tada/dataset.hpp"
#include "tada/errors.hpp"
#include "tada/t_algebra.hpp"
#include "tada/tem.hpp"

namespace tada {

class WeakHypothesis {
 public:
  virtual ~WeakHypothesis() = default;
  virtual double predict(const Dataset& data, std::size_t row) const = 0;
};

using HypothesisPtr = std::shared_ptr<const WeakHypothesis>;

/// Produces a weak hypothesis for the current tempered weights.
class WeakLearner {
 public:
  virtual ~WeakLearner() = default;
  virtual HypothesisPtr fit(const Dataset& train, const TemWeights& q) = 0;
};

/// Edges are kept within [-1 + cap, 1 - cap] before leveraging.
inline constexpr double kEdgeCap = 1e-12;

struct IterationRecord {
  double rho = 0.0;       // edge, before capping
  double r = 0.0;         // max normalized confidence
  double q_dagger = 0.0;  // surrogate weight of switched-off examples
  std::size_t m_dagger = 0;
  double mu = 0.0;     // weight-update coefficient
  double alpha = 0.0;  // leveraging coefficient (equals the unravel coefficient v_j)
  double z = 0.0;      // normalizer Z_tj
  double bound_factor = 0.0;  // (1 + m_dagger q_dagger^{2-t}) K_t(rho)
  double min_codensity = 0.0;  // of the updated weights
  double max_codensity = 0.0;
  /// Weights that became +inf before normalization, or zero for t >= 1.
  std::size_t infinite_weight_count = 0;
};

struct EnsembleMember {
  HypothesisPtr h;
  double mu = 0.0;
  double alpha = 0.0;
  double z = 0.0;
};

class Ensemble {
 public:
  Ensemble(TemperConfig cfg, std::size_t training_size);

  void add(EnsembleMember member) { members_.push_back(std::move(member)); }

  const std::vector<EnsembleMember>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const TemperConfig& cfg() const noexcept { return cfg_; }
  std::size_t training_size() const noexcept { return m_; }

  /// 1/(1-t) for t < 1, +inf at t = 1.
  double clamp_level() const;

 private:
  TemperConfig cfg_;
  std::size_t m_;
  std::vector<EnsembleMember> members_;
};

struct Prediction {
  double score = 0.0;
  int label = 1;  // sign(score), sign(0) = +1
};

inline int sign_label(double score) { return score >= 0.0 ? 1 : -1; }

/// Unclamped: sum_j alpha_j h_j(x). Clamped (t < 1 only): two-sided clamped
/// sum over members in training order at delta = 1/(1-t).
Prediction predict(const Ensemble& ens, const Dataset& data, std::size_t row, bool clamped);

struct ConfidenceBounds {
  double r = 0.0;
  double q_dagger = 0.0;
};

/// R = max_{i off dagger} |u_i| / q_i^{1-t};
/// q_dagger = (max_{i on dagger} |u_i| / R)^{1/(1-t)}, 0 for an empty dagger set.
ConfidenceBounds confidence_bounds(const TemWeights& q, std::span<const double> u);

/// rho = sum_i q'_i u_i / ((1 + m_dagger q_dagger^{2-t}) R).
double edge(const TemWeights& q, std::span<const double> u, double r, double q_dagger);

struct Leveraging {
  double mu = 0.0;
  double alpha = 0.0;
};

/// mu = -(1/R) log_t((1-rho) / M_{1-t}(1-rho, 1+rho)),
/// alpha = m^{1-t*} (prod_{k<j} Z_tk)^{1-t} mu.
Leveraging leveraging(double rho, double r, const TemperConfig& cfg, double z_product,
                      std::size_t m);

/// K_t(z) = (1 - z^2) / M_{1-t}(1-z, 1+z).
double kt_bound(double rho, const TemperConfig& cfg);

/// (1/m) sum_i exp_t^{2-t}(-margin_i) with margin_i = y_i H(x_i).
double tempered_exp_loss(std::span<const double> margins, const TemperConfig& cfg);

struct BoostOptions {
  std::size_t iterations = 20;
  /// Starting weights; uniform 1/m^{t*} when absent.
  std::optional<TemWeights> initial_weights;
  /// Keep q_{j+1} and u_j for every round (tests and diagnostics).
  bool record_vectors = false;
};

struct BoostResult {
  Ensemble ensemble;
  std::vector<IterationRecord> trace;
  TemWeights final_weights;
  /// Set when a round could not complete; the ensemble holds the rounds
  /// that did.
  std::optional<Error> stopped;
  std::vector<std::vector<double>> weights;  // q_{j+1}, when recorded
  std::vector<std::vector<double>> margins;  // u_j, when recorded
};

BoostResult boost(const Dataset& train, WeakLearner& learner, const TemperConfig& cfg,
                  const BoostOptions& options);

/// Training-risk guarantee of a boosting run: both the linear and the
/// clamped model have 0/1 risk <= prod Z^{2-t} <= prod bound_factor.
struct RiskBoundCheck {
  double train_error = 0.0;
  double train_error_clamped = 0.0;  // NaN for t >= 1
  double z_product = 1.0;            // prod Z_tj^{2-t}
  double bound_product = 1.0;        // prod bound_factor
  bool holds = true;
};

RiskBoundCheck check_risk_bound(const Dataset& train, const BoostResult& result);

}  // namespace tada
