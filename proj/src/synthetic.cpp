#include "tada/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tada/errors.hpp"
#include "tada/rng.hpp"

namespace tada::synth {

namespace {

double gaussian(Rng& rng) {
  // Box-Muller; the portable generator has no normal distribution of its own.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Column numeric_column(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = FeatureKind::numeric;
  c.numeric = std::move(values);
  return c;
}

Dataset assemble(std::vector<std::vector<double>> x, std::vector<int> y, const char* prefix,
                 std::pair<std::string, std::string> label_names) {
  std::vector<Column> cols;
  for (std::size_t k = 0; k < x.size(); ++k) {
    cols.push_back(numeric_column(prefix + std::to_string(k + 1), std::move(x[k])));
  }
  return Dataset(std::move(cols), std::move(y), "class", std::move(label_names));
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

Dataset sonar_like(std::uint64_t seed) {
  constexpr std::size_t m = 208;
  constexpr std::size_t d = 60;
  Rng rng(seed);
  std::vector<std::vector<double>> x(d, std::vector<double>(m));
  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool mine = i < 111;
    y[i] = mine ? 1 : -1;
    // Returns are a bump in frequency whose position and width depend on the class.
    const double centre = (mine ? 0.45 : 0.35) + 0.12 * gaussian(rng);
    const double width = (mine ? 0.10 : 0.16) * (1.0 + 0.2 * gaussian(rng));
    const double gain = 0.5 + 0.25 * rng.uniform();
    for (std::size_t k = 0; k < d; ++k) {
      const double f = static_cast<double>(k) / (d - 1);
      const double z = (f - centre) / width;
      const double v = gain * std::exp(-0.5 * z * z) + 0.08 * std::abs(gaussian(rng));
      x[k][i] = round4(std::min(1.0, v));
    }
  }
  return assemble(std::move(x), std::move(y), "band", {"M", "R"});
}

Dataset ionosphere_like(std::uint64_t seed) {
  constexpr std::size_t m = 351;
  constexpr std::size_t d = 34;
  Rng rng(seed);
  std::vector<std::vector<double>> x(d, std::vector<double>(m));
  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(d);
    for (auto& v : row) v = 2.0 * rng.uniform() - 1.0;
    const double phase = row[2] * row[3] + 0.5 * row[4] - 0.4 * row[6] * row[6];
    const double noise = 0.25 * gaussian(rng);
    y[i] = phase + noise > -0.05 ? 1 : -1;
    for (std::size_t k = 0; k < d; ++k) x[k][i] = round4(row[k]);
  }
  return assemble(std::move(x), std::move(y), "pulse", {"b", "g"});
}

Dataset credit_like(std::uint64_t seed) {
  constexpr std::size_t m = 300;
  Rng rng(seed);
  std::vector<std::vector<double>> num(6, std::vector<double>(m));
  std::vector<std::vector<int>> cat(3, std::vector<int>(m));
  const std::size_t levels[3] = {4, 3, 5};
  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < 6; ++k) num[k][i] = round4(gaussian(rng) * (1.0 + k));
    for (std::size_t k = 0; k < 3; ++k) cat[k][i] = static_cast<int>(rng.below(levels[k]));
    const double score = 0.8 * num[0][i] - 0.3 * num[2][i] + (cat[0][i] == 1 ? 1.2 : 0.0) +
                         (cat[1][i] == 2 ? -0.9 : 0.0) + 0.2 * cat[2][i] - 0.3 +
                         0.6 * gaussian(rng);
    y[i] = score > 0.0 ? 1 : -1;
  }
  std::vector<Column> cols;
  for (std::size_t k = 0; k < 6; ++k) {
    cols.push_back(numeric_column("a" + std::to_string(k + 1), std::move(num[k])));
  }
  for (std::size_t k = 0; k < 3; ++k) {
    Column c;
    c.name = "c" + std::to_string(k + 1);
    c.kind = FeatureKind::categorical;
    for (std::size_t v = 0; v < levels[k]; ++v) c.categories.push_back("v" + std::to_string(v));
    c.codes = std::move(cat[k]);
    cols.push_back(std::move(c));
  }
  return Dataset(std::move(cols), std::move(y), "class", {"bad", "good"});
}

Dataset linearly_separable(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m < 2 || d < 1) throw Error(ErrorCode::invalid_argument, "need m >= 2 and d >= 1");
  Rng rng(seed);
  std::vector<double> w(d);
  double norm = 0.0;
  for (auto& v : w) {
    v = gaussian(rng);
    norm += v * v;
  }
  for (auto& v : w) v /= std::sqrt(norm);
  std::vector<std::vector<double>> x(d, std::vector<double>(m));
  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> p(d);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      p[k] = 2.0 * rng.uniform() - 1.0;
      s += w[k] * p[k];
    }
    // Push points away from the hyperplane to leave a margin of 0.1.
    y[i] = i % 2 == 0 ? 1 : -1;
    const double shift = y[i] * (0.1 + std::abs(s)) - s;
    for (std::size_t k = 0; k < d; ++k) x[k][i] = p[k] + shift * w[k];
  }
  return assemble(std::move(x), std::move(y), "x", {"neg", "pos"});
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames{"sonar", "ionosphere", "credit"};
  return kNames;
}

Dataset by_name(const std::string& name, std::uint64_t seed) {
  if (name == "sonar") return sonar_like(seed);
  if (name == "ionosphere") return ionosphere_like(seed);
  if (name == "credit") return credit_like(seed);
  throw Error(ErrorCode::invalid_argument, "unknown synthetic dataset '" + name + "'");
}

}  // namespace tada::synth
