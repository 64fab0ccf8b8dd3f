#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tada::testing {

Dataset numeric_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& y) {
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<Column> cols(d);
  for (std::size_t k = 0; k < d; ++k) {
    cols[k].name = "x" + std::to_string(k);
    for (const auto& r : rows) cols[k].numeric.push_back(r[k]);
  }
  return Dataset(std::move(cols), y, "y", {"neg", "pos"});
}

Dataset index_dataset(const std::vector<int>& y) {
  std::vector<std::vector<double>> rows(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) rows[i] = {static_cast<double>(i)};
  return numeric_dataset(rows, y);
}

std::vector<int> random_labels(std::size_t m, Rng& rng) {
  std::vector<int> y(m);
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1 : -1;
  y[0] = 1;
  if (m > 1) y[1] = -1;
  return y;
}

double Stump::predict(const Dataset& data, std::size_t row) const {
  return data.column(feature_).numeric[row] >= threshold_ ? polarity_ : -polarity_;
}

namespace {

struct StumpChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
};

StumpChoice scan_stumps(const Dataset& data, const std::vector<double>& d) {
  double best = -1.0;
  StumpChoice out;
  for (std::size_t f = 0; f < data.feature_count(); ++f) {
    const auto& x = data.column(f).numeric;
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double thr = 0.5 * (v[k] + v[k + 1]);
      double corr = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        corr += d[i] * data.label(i) * (x[i] >= thr ? 1.0 : -1.0);
      }
      if (std::abs(corr) > best) {
        best = std::abs(corr);
        out = {f, thr, corr >= 0.0 ? 1 : -1};
      }
    }
  }
  return out;
}

}  // namespace

HypothesisPtr StumpLearner::fit(const Dataset& train, const TemWeights& q) {
  const StumpChoice c = scan_stumps(train, co_density(q).p);
  return std::make_shared<Stump>(c.feature, c.threshold, c.polarity);
}

std::vector<double> best_stump_outputs(const Dataset& data, const std::vector<double>& d) {
  const StumpChoice c = scan_stumps(data, d);
  const Stump s(c.feature, c.threshold, c.polarity);
  std::vector<double> h(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) h[i] = s.predict(data, i);
  return h;
}

double Lookup::predict(const Dataset& data, std::size_t row) const {
  return values_.at(static_cast<std::size_t>(data.column(0).numeric[row]));
}

HypothesisPtr EnforcedEdgeLearner::fit(const Dataset& train, const TemWeights& q) {
  const std::size_t m = train.size();
  const CoDensity p = co_density(q);
  const double k = q.cfg().one_minus_t();
  std::vector<int> s(m, 1);
  double rho = std::accumulate(p.p.begin(), p.p.end(), 0.0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng_.shuffle(std::span<std::size_t>(order));
  for (const std::size_t i : order) {
    if (rho - 2.0 * p.p[i] >= target_) {
      s[i] = -1;
      rho -= 2.0 * p.p[i];
    }
  }
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) {
    h[i] = train.label(i) * s[i] * (q[i] > 0.0 ? std::pow(q[i], k) : 0.0);
  }
  return std::make_shared<Lookup>(std::move(h));
}

HypothesisPtr ScriptedLearner::fit(const Dataset&, const TemWeights&) {
  return script_.at(next_++);
}

std::vector<AdaBoostRound> textbook_adaboost(const Dataset& data, std::size_t rounds) {
  const std::size_t m = data.size();
  std::vector<double> d(m, 1.0 / static_cast<double>(m));
  std::vector<AdaBoostRound> out;
  for (std::size_t j = 0; j < rounds; ++j) {
    const std::vector<double> h = best_stump_outputs(data, d);
    double r = 0.0;
    for (std::size_t i = 0; i < m; ++i) r += d[i] * data.label(i) * h[i];
    AdaBoostRound round;
    round.alpha = 0.5 * std::log((1.0 + r) / (1.0 - r));
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      d[i] *= std::exp(-round.alpha * data.label(i) * h[i]);
      z += d[i];
    }
    for (auto& v : d) v /= z;
    round.z = z;
    round.weights = d;
    out.push_back(std::move(round));
  }
  return out;
}

double relative_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace tada::testing
