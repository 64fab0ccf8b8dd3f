#include "tada/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "tada/errors.hpp"
#include "tada/tem.hpp"
#include "tada/tempered_loss.hpp"

namespace tada {

namespace {

constexpr std::uint64_t kMaxCategoryBits = 62;

double weighted_risk(const LeafStats& s, const TemperConfig& cfg) {
  return s.mass() * bayes_risk(s.p(), cfg);
}

// Split candidates of one feature within one leaf, in canonical order.
struct FeatureCandidates {
  std::size_t feature = 0;
  FeatureKind kind = FeatureKind::numeric;
  std::uint64_t count = 0;
  // numeric: distinct sorted values, class masses strictly below and at or
  // above each (summed separately so an empty side is exactly zero)
  std::vector<double> values;
  std::vector<LeafStats> below;
  std::vector<LeafStats> above;
  // categorical: present codes and their masses
  std::vector<int> codes;
  std::vector<LeafStats> code_mass;
};

FeatureCandidates describe_feature(const Dataset& data, std::size_t f,
                                   const std::vector<std::size_t>& rows,
                                   std::span<const double> w) {
  const Column& col = data.column(f);
  FeatureCandidates fc;
  fc.feature = f;
  fc.kind = col.kind;
  if (col.kind == FeatureKind::numeric) {
    std::vector<std::size_t> order = rows;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return col.numeric[a] < col.numeric[b];
    });
    LeafStats acc;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k];
      if (k == 0 || col.numeric[i] != fc.values.back()) {
        fc.values.push_back(col.numeric[i]);
        fc.below.push_back(acc);
      }
      (data.label(i) > 0 ? acc.pos : acc.neg) += w[i];
    }
    fc.above.resize(fc.values.size());
    acc = {};
    std::size_t v = fc.values.size();
    for (std::size_t k = order.size(); k-- > 0;) {
      const std::size_t i = order[k];
      (data.label(i) > 0 ? acc.pos : acc.neg) += w[i];
      if (k == 0 || col.numeric[order[k - 1]] != col.numeric[i]) fc.above[--v] = acc;
    }
    fc.count = fc.values.empty() ? 0 : fc.values.size() - 1;
    return fc;
  }
  std::vector<LeafStats> mass(col.category_count());
  std::vector<bool> present(col.category_count(), false);
  for (const std::size_t i : rows) {
    const int c = col.codes[i];
    present[c] = true;
    (data.label(i) > 0 ? mass[c].pos : mass[c].neg) += w[i];
  }
  for (std::size_t c = 0; c < present.size(); ++c) {
    if (present[c]) {
      fc.codes.push_back(static_cast<int>(c));
      fc.code_mass.push_back(mass[c]);
    }
  }
  const std::size_t k = fc.codes.size();
  if (k >= 2) {
    if (k - 1 > kMaxCategoryBits) {
      throw Error(ErrorCode::invalid_argument,
                  "column '" + col.name + "' has more than " +
                      std::to_string(kMaxCategoryBits + 1) + " categories in one leaf");
    }
    fc.count = (std::uint64_t{1} << (k - 1)) - 1;
  }
  return fc;
}

struct Candidate {
  SplitPredicate predicate;
  LeafStats left;
  LeafStats right;
};

// The local index-th candidate of a feature (0-based in canonical order).
Candidate materialize(const FeatureCandidates& fc, std::uint64_t index) {
  Candidate c;
  c.predicate.feature = fc.feature;
  c.predicate.kind = fc.kind;
  if (fc.kind == FeatureKind::numeric) {
    const double lo = fc.values[index];
    const double hi = fc.values[index + 1];
    double a = lo + 0.5 * (hi - lo);
    if (!(a > lo)) a = hi;
    c.predicate.threshold = a;
    c.left = fc.below[index + 1];
    c.right = fc.above[index + 1];
  } else {
    const std::uint64_t mask = index + 1;
    for (std::size_t b = 0; b + 1 < fc.codes.size(); ++b) {
      LeafStats& side = ((mask >> b) & 1U) ? c.right : c.left;
      if (&side == &c.right) c.predicate.right_codes.push_back(fc.codes[b]);
      side.pos += fc.code_mass[b].pos;
      side.neg += fc.code_mass[b].neg;
    }
    c.left.pos += fc.code_mass.back().pos;
    c.left.neg += fc.code_mass.back().neg;
  }
  return c;
}

// Floyd's sampling of `k` distinct values from [0, n), returned sorted.
std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::uint64_t k, Rng& rng) {
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t x = rng.below(j + 1);
    if (!chosen.insert(x).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

LeafStats stats_of(const Dataset& data, const std::vector<std::size_t>& rows,
                   std::span<const double> w) {
  LeafStats s;
  for (const std::size_t i : rows) (data.label(i) > 0 ? s.pos : s.neg) += w[i];
  return s;
}

std::optional<Candidate> best_split(const Dataset& data, const std::vector<std::size_t>& rows,
                                    const LeafStats& parent, std::span<const double> w,
                                    const TemperConfig& cfg, std::size_t cap, Rng& rng) {
  std::vector<FeatureCandidates> features;
  features.reserve(data.feature_count());
  std::uint64_t total = 0;
  for (std::size_t f = 0; f < data.feature_count(); ++f) {
    features.push_back(describe_feature(data, f, rows, w));
    const std::uint64_t room = std::numeric_limits<std::uint64_t>::max() - total;
    total += std::min(features.back().count, room);
  }
  if (total == 0) return std::nullopt;

  std::vector<std::uint64_t> picks;
  const bool sampled = cap > 0 && total > cap;
  if (sampled) picks = sample_indices(total, cap, rng);

  std::optional<Candidate> best;
  double best_gain = -std::numeric_limits<double>::infinity();
  auto consider = [&](const FeatureCandidates& fc, std::uint64_t local) {
    Candidate c = materialize(fc, local);
    const auto gain = split_gain(parent, c.left, c.right, cfg);
    if (gain && *gain > best_gain) {
      best_gain = *gain;
      best = std::move(c);
    }
  };
  if (!sampled) {
    for (const auto& fc : features) {
      for (std::uint64_t j = 0; j < fc.count; ++j) consider(fc, j);
    }
    return best;
  }
  std::size_t f = 0;
  std::uint64_t offset = 0;
  for (const std::uint64_t g : picks) {
    while (g >= offset + features[f].count) offset += features[f++].count;
    consider(features[f], g - offset);
  }
  return best;
}

}  // namespace

double leaf_prediction(double p, double q1, const TemperConfig& cfg) {
  cfg.require_finite("leaf_prediction");
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::domain, "leaf_prediction needs p in (0, 1)");
  }
  if (!(q1 > 0.0)) throw Error(ErrorCode::domain, "leaf_prediction needs q1 > 0");
  const double logit = std::log(p) - std::log1p(-p);
  if (cfg.is_classic()) return 0.5 * logit;
  const double k = cfg.one_minus_t();
  // (a - b)/(a + b) with a = p^k, b = (1-p)^k is tanh(k logit / 2).
  return std::pow(q1, k) * std::tanh(0.5 * k * logit) / k;
}

std::optional<double> split_gain(const LeafStats& parent, const LeafStats& left,
                                 const LeafStats& right, const TemperConfig& cfg) {
  if (parent.pure()) {
    throw Error(ErrorCode::domain, "split_gain: the parent node is pure");
  }
  if (left.pure() || right.pure()) return std::nullopt;
  return weighted_risk(parent, cfg) - weighted_risk(left, cfg) - weighted_risk(right, cfg);
}

bool SplitPredicate::goes_right(const Dataset& data, std::size_t row) const {
  const Column& col = data.column(feature);
  if (kind == FeatureKind::numeric) return col.numeric[row] >= threshold;
  return std::binary_search(right_codes.begin(), right_codes.end(), col.codes[row]);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, TemperConfig cfg,
                           std::vector<double> risk_history)
    : nodes_(std::move(nodes)), cfg_(cfg), risk_history_(std::move(risk_history)) {
  if (nodes_.empty()) throw Error(ErrorCode::invalid_argument, "a tree needs a root");
}

std::size_t DecisionTree::leaf_index(const Dataset& data, std::size_t row) const {
  std::size_t k = 0;
  while (!nodes_[k].is_leaf()) {
    k = static_cast<std::size_t>(nodes_[k].split->goes_right(data, row) ? nodes_[k].right
                                                                         : nodes_[k].left);
  }
  return k;
}

double DecisionTree::predict(const Dataset& data, std::size_t row) const {
  return nodes_[leaf_index(data, row)].prediction;
}

double DecisionTree::predict_by_increments(const Dataset& data, std::size_t row) const {
  std::size_t k = 0;
  double sum = nodes_[0].prediction;
  while (!nodes_[k].is_leaf()) {
    const std::size_t next = static_cast<std::size_t>(
        nodes_[k].split->goes_right(data, row) ? nodes_[k].right : nodes_[k].left);
    sum += nodes_[next].prediction - nodes_[k].prediction;
    k = next;
  }
  return sum;
}

std::vector<std::size_t> DecisionTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].is_leaf()) out.push_back(k);
  }
  return out;
}

double DecisionTree::expected_bayes_risk() const {
  double sum = 0.0;
  for (const std::size_t k : leaves()) sum += nodes_[k].r * bayes_risk(nodes_[k].stats.p(), cfg_);
  return sum;
}

DecisionTree induce_tree(const Dataset& data, std::span<const double> weights, double q1,
                         const TemperConfig& cfg, const TreeOptions& options, Rng& rng) {
  cfg.require_finite("induce_tree");
  if (options.max_nodes < 1 || options.max_nodes % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "max_nodes must be odd and at least 1");
  }
  if (data.size() == 0) throw Error(ErrorCode::invalid_argument, "induce_tree: empty dataset");
  if (weights.size() != data.size()) {
    throw Error(ErrorCode::invalid_argument, "induce_tree: weight vector has the wrong size");
  }
  for (const double x : weights) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::invalid_argument, "induce_tree: weights must be finite and >= 0");
    }
  }
  if (data.count_label(1) == 0 || data.count_label(-1) == 0) {
    throw Error(ErrorCode::single_class, "induce_tree: both classes must be present");
  }

  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const LeafStats root_stats = stats_of(data, all, weights);
  if (root_stats.pure()) {
    throw Error(ErrorCode::degenerate_hypothesis, "induce_tree: one class carries no weight");
  }
  const double total = root_stats.mass();

  std::vector<TreeNode> nodes;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<bool> terminal;
  auto add_node = [&](int parent, const LeafStats& s, std::vector<std::size_t> members) {
    TreeNode n;
    n.parent = parent;
    n.stats = s;
    n.r = s.mass() / total;
    n.prediction = leaf_prediction(s.p(), q1, cfg);
    nodes.push_back(std::move(n));
    rows.push_back(std::move(members));
    terminal.push_back(false);
    return static_cast<int>(nodes.size() - 1);
  };
  add_node(-1, root_stats, std::move(all));

  auto risk_now = [&] {
    double sum = 0.0;
    for (const auto& n : nodes) {
      if (n.is_leaf()) sum += n.r * bayes_risk(n.stats.p(), cfg);
    }
    return sum;
  };
  std::vector<double> history{risk_now()};

  while (nodes.size() + 2 <= options.max_nodes) {
    // Heaviest open leaf; the lowest id wins ties.
    int pick = -1;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (!nodes[k].is_leaf() || terminal[k]) continue;
      if (pick < 0 || nodes[k].r > nodes[pick].r) pick = static_cast<int>(k);
    }
    if (pick < 0) break;
    const auto found = best_split(data, rows[pick], nodes[pick].stats, weights, cfg,
                                  options.split_cap, rng);
    if (!found) {
      terminal[pick] = true;
      continue;
    }
    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (const std::size_t i : rows[pick]) {
      (found->predicate.goes_right(data, i) ? right_rows : left_rows).push_back(i);
    }
    // Recount from the partition so node masses never drift from prefix sums.
    const LeafStats ls = stats_of(data, left_rows, weights);
    const LeafStats rs = stats_of(data, right_rows, weights);
    const int l = add_node(pick, ls, std::move(left_rows));
    const int r = add_node(pick, rs, std::move(right_rows));
    nodes[pick].split = found->predicate;
    nodes[pick].left = l;
    nodes[pick].right = r;
    rows[pick].clear();
    history.push_back(risk_now());
  }
  return DecisionTree(std::move(nodes), cfg, std::move(history));
}

TreeWeakLearner::TreeWeakLearner(TreeOptions options, std::uint64_t seed)
    : options_(options), rng_(seed) {}

HypothesisPtr TreeWeakLearner::fit(const Dataset& train, const TemWeights& q) {
  const TemperConfig& cfg = q.cfg();
  const CoDensity p = co_density(q);
  const double q1 = std::pow(static_cast<double>(train.size()), -cfg.t_star());
  return std::make_shared<DecisionTree>(induce_tree(train, p.p, q1, cfg, options_, rng_));
}

}  // namespace tada
