#pragma once

// Decision-tree weak learner for tempered boosting. Trees grow top-down by
// expanding the heaviest leaf with the split that most reduces the expected
// tempered Bayes risk; no split may create a pure leaf. Node values come
// from the closed-form boosting projection restricted to a leaf.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tada/booster.hpp"
#include "tada/dataset.hpp"
#include "tada/rng.hpp"
#include "tada/t_algebra.hpp"

namespace tada {

/// Weighted class masses of a node.
struct LeafStats {
  double pos = 0.0;
  double neg = 0.0;

  double mass() const noexcept { return pos + neg; }
  double p() const noexcept { return pos / (pos + neg); }
  bool pure() const noexcept { return !(pos > 0.0) || !(neg > 0.0); }
};

/// (q1^{1-t}/(1-t)) (p^{1-t} - (1-p)^{1-t}) / (p^{1-t} + (1-p)^{1-t});
/// half the log-odds at t = 1.
double leaf_prediction(double p, double q1, const TemperConfig& cfg);

/// Decrease of the mass-weighted Bayes risk from parent to children, or
/// nullopt when a child is empty or pure (such splits are inadmissible).
std::optional<double> split_gain(const LeafStats& parent, const LeafStats& left,
                                 const LeafStats& right, const TemperConfig& cfg);

/// Numeric: x_k >= threshold goes right. Categorical: codes listed in
/// `right_codes` (sorted) go right.
struct SplitPredicate {
  std::size_t feature = 0;
  FeatureKind kind = FeatureKind::numeric;
  double threshold = 0.0;
  std::vector<int> right_codes;

  bool goes_right(const Dataset& data, std::size_t row) const;
};

struct TreeNode {
  std::optional<SplitPredicate> split;  // set for internal nodes
  int left = -1;
  int right = -1;
  int parent = -1;
  LeafStats stats;
  double r = 0.0;           // mass fraction of the node
  double prediction = 0.0;  // leaf_prediction(p) of the node

  bool is_leaf() const noexcept { return !split.has_value(); }
};

class DecisionTree final : public WeakHypothesis {
 public:
  DecisionTree(std::vector<TreeNode> nodes, TemperConfig cfg, std::vector<double> risk_history);

  /// Value of the leaf reached by the row.
  double predict(const Dataset& data, std::size_t row) const override;
  /// Same value as the sum of node increments along the root-to-leaf path.
  double predict_by_increments(const Dataset& data, std::size_t row) const;
  std::size_t leaf_index(const Dataset& data, std::size_t row) const;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::vector<std::size_t> leaves() const;

  /// sum over leaves of r_leaf L_t(p_leaf).
  double expected_bayes_risk() const;
  /// Expected Bayes risk of the root and after each expansion.
  const std::vector<double>& risk_history() const noexcept { return risk_history_; }

 private:
  std::vector<TreeNode> nodes_;
  TemperConfig cfg_;
  std::vector<double> risk_history_;
};

struct TreeOptions {
  std::size_t max_nodes = 15;  // odd: root plus pairs of children
  std::size_t split_cap = 2000;
};

/// `weights` is a probability vector over the rows (the booster's
/// co-density); q1 is the initial boosting weight m^{-t*}.
DecisionTree induce_tree(const Dataset& data, std::span<const double> weights, double q1,
                         const TemperConfig& cfg, const TreeOptions& options, Rng& rng);

/// Adapter plugging tree induction into the booster. Candidate sampling
/// draws from a generator owned by the learner.
class TreeWeakLearner final : public WeakLearner {
 public:
  TreeWeakLearner(TreeOptions options, std::uint64_t seed);

  HypothesisPtr fit(const Dataset& train, const TemWeights& q) override;

 private:
  TreeOptions options_;
  Rng rng_;
};

}  // namespace tada
