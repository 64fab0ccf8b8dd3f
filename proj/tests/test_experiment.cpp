#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tada/errors.hpp"
#include "tada/experiment.hpp"
#include "tada/synthetic.hpp"

using namespace tada;

namespace {

// Two-sided tail of Student's t by Simpson quadrature of the density.
double t_two_sided_p(double stat, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * std::numbers::pi);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double a = 0.0, b = std::abs(stat);
  const int n = 20000;
  const double h = (b - a) / n;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * s * h / 3.0;
}

RunSpec small_spec() {
  RunSpec s;
  s.t_values = {0.0, 0.6, 1.0, 1.1};
  s.iterations = 4;
  s.tree_nodes = 5;
  s.folds = 3;
  s.seed = 11;
  return s;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tada_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("paired t-test") {
  const std::vector<double> same{0.1, 0.2, 0.3, 0.25};
  auto r = paired_ttest(same, same);
  CHECK(r.outcome == Comparison::equivalent);
  CHECK(r.p_value == doctest::Approx(1.0));

  const std::vector<double> low(10, 0.1), high(10, 0.3);
  r = paired_ttest(low, high);
  CHECK(r.outcome == Comparison::better);
  CHECK(r.p_value < 1e-12);
  CHECK(paired_ttest(high, low).outcome == Comparison::worse);

  // differences with mean/sd chosen by hand
  const std::vector<double> a{0.30, 0.25, 0.28, 0.40, 0.22, 0.35, 0.31, 0.27, 0.33, 0.29};
  const std::vector<double> b{0.28, 0.26, 0.20, 0.35, 0.21, 0.30, 0.33, 0.25, 0.30, 0.22};
  double md = 0;
  for (std::size_t i = 0; i < a.size(); ++i) md += a[i] - b[i];
  md /= 10;
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += std::pow(a[i] - b[i] - md, 2);
  const double stat = md / std::sqrt(ss / 9 / 10);
  r = paired_ttest(a, b);
  CHECK(r.df == 9);
  CHECK(r.statistic == doctest::Approx(stat).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(t_two_sided_p(stat, 9)).epsilon(1e-8));
  CHECK(t_two_sided_p(2.262157, 9) == doctest::Approx(0.05).epsilon(1e-5));

  CHECK_THROWS_AS(paired_ttest({0.1}, {0.2}), Error);
  CHECK_THROWS_AS(paired_ttest({0.1, 0.2}, {0.2}), Error);
  CHECK_THROWS_AS(paired_ttest(same, same, 0.0), Error);
}

TEST_CASE("clamped mode parsing and spec validation") {
  CHECK(parse_clamped_mode("both") == ClampedMode::both);
  CHECK(parse_clamped_mode("on") == ClampedMode::on);
  CHECK(parse_clamped_mode("off") == ClampedMode::off);
  CHECK_THROWS_AS(parse_clamped_mode("maybe"), Error);
  RunSpec s;
  CHECK_NOTHROW(validate(s));
  s.t_values = {0.5, 0.5};
  CHECK_THROWS_AS(validate(s), Error);
  s.t_values = {2.0};
  CHECK_THROWS_AS(validate(s), Error);
  s = RunSpec{};
  s.tree_nodes = 4;
  CHECK_THROWS_AS(validate(s), Error);
  s = RunSpec{};
  s.eta = 1.0;
  CHECK_THROWS_AS(validate(s), Error);
  s = RunSpec{};
  s.folds = 1;
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("run shape and per-row invariants") {
  const Dataset data = synth::credit_like(5);
  const RunSpec spec = small_spec();
  const RunResult r = run_experiment(data, spec);
  REQUIRE(r.complete());
  CHECK(r.cells.size() == spec.folds * spec.t_values.size());
  CHECK(r.trace.size() == spec.folds * spec.t_values.size() * spec.iterations);
  for (const auto& row : r.trace) {
    CHECK(row.j >= 1);
    CHECK(row.j <= spec.iterations);
    CHECK(row.min_codensity <= row.max_codensity);
    CHECK(row.min_codensity >= 0.0);
    CHECK(std::abs(row.rho) <= 1.0);
    CHECK(row.bound_factor <= 1.0 + 1e-12);
    if (row.t > 1.0) {
      CHECK(std::isnan(row.test_err_clamped));
    } else {
      CHECK_FALSE(std::isnan(row.test_err_clamped));
    }
    CHECK_FALSE(std::isnan(row.test_err_unclamped));
    if (row.t == 1.0) CHECK(row.test_err_clamped == row.test_err_unclamped);
  }
  // the training error is bounded by the running product of bound factors
  std::map<std::pair<std::size_t, double>, double> prod;
  for (const auto& row : r.trace) {
    double& p = prod.try_emplace({row.fold, row.t}, 1.0).first->second;
    p *= row.bound_factor;
    CHECK(row.train_err <= p + 1e-9);
  }
}

TEST_CASE("clamped modes select columns") {
  const Dataset data = synth::credit_like(5);
  RunSpec spec = small_spec();
  spec.clamped = ClampedMode::on;
  for (const auto& row : run_experiment(data, spec).trace) {
    CHECK(std::isnan(row.test_err_unclamped));
  }
  spec.clamped = ClampedMode::off;
  for (const auto& row : run_experiment(data, spec).trace) {
    CHECK(std::isnan(row.test_err_clamped));
    CHECK_FALSE(std::isnan(row.test_err_unclamped));
  }
}

TEST_CASE("separable data reaches zero training error") {
  // Ten features: in the plane, trees without pure leaves cannot isolate the
  // last boundary points and training error stalls at one or two examples.
  const Dataset data = synth::linearly_separable(200, 10, 3);
  RunSpec spec;
  spec.t_values = {0.6};
  spec.iterations = 20;
  spec.tree_nodes = 15;
  spec.folds = 5;
  const RunResult r = run_experiment(data, spec);
  REQUIRE(r.complete());
  for (const auto& row : r.trace) {
    if (row.j == spec.iterations) CHECK(row.train_err == 0.0);
  }
}

TEST_CASE("deterministic across runs and thread counts") {
  const Dataset data = synth::credit_like(5);
  RunSpec spec = small_spec();
  spec.eta = 0.1;
  const std::string one = trace_csv(run_experiment(data, spec).trace);
  CHECK(trace_csv(run_experiment(data, spec).trace) == one);
  spec.jobs = 3;
  CHECK(trace_csv(run_experiment(data, spec).trace) == one);
  spec.seed = 12;
  CHECK(trace_csv(run_experiment(data, spec).trace) != one);
}

TEST_CASE("run writes artifacts and the manifest reproduces the trace") {
  const auto dir = scratch("run");
  std::filesystem::create_directories(dir);
  const auto csv = dir / "credit.csv";
  write_csv(synth::credit_like(7), csv);
  RunSpec spec = small_spec();
  spec.data = csv;
  spec.out = dir / "out";
  spec.eta = 0.05;
  const RunResult r = run(spec);
  REQUIRE(r.complete());
  for (const char* f : {"trace.csv", "summary.csv", "config.json"}) {
    CHECK(std::filesystem::exists(spec.out / f));
  }
  for (const auto& panel : panel_columns()) {
    CHECK(std::filesystem::exists(spec.out / "plots" / (panel + ".csv")));
    CHECK(std::filesystem::exists(spec.out / "plots" / (panel + ".svg")));
  }
  const std::string trace = slurp(spec.out / "trace.csv");
  CHECK(trace.rfind("fold,t,j,train_err,test_err_unclamped,test_err_clamped,", 0) == 0);

  RunSpec again = load_manifest(spec.out / "config.json");
  CHECK(again.seed == spec.seed);
  CHECK(again.t_values == spec.t_values);
  CHECK(again.eta == spec.eta);
  again.out = dir / "again";
  run(again);
  CHECK(slurp(again.out / "trace.csv") == trace);
  std::filesystem::remove_all(dir);
}

TEST_CASE("panel aggregation matches a recomputation from trace text") {
  const Dataset data = synth::credit_like(5);
  const RunSpec spec = small_spec();
  const auto trace = run_experiment(data, spec).trace;
  const std::string text = trace_csv(trace);

  // column 4 of the CSV is test_err_unclamped
  std::map<std::pair<double, std::size_t>, std::pair<double, int>> acc;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    const double t = std::stod(cells[1]);
    const auto j = static_cast<std::size_t>(std::stoul(cells[2]));
    if (cells[4] == "nan") continue;
    auto& slot = acc[{t, j}];
    slot.first += std::stod(cells[4]);
    slot.second += 1;
  }
  const PanelData panel = aggregate_panel(trace, "test_err_unclamped");
  CHECK(panel.size() == spec.t_values.size());
  for (const auto& [key, v] : acc) {
    const auto it = panel.find(key.first);
    REQUIRE(it != panel.end());
    CHECK(it->second[key.second - 1] ==
          doctest::Approx(v.first / v.second).epsilon(1e-12));
  }
  const PanelData clamped = aggregate_panel(trace, "test_err_clamped");
  CHECK(std::isnan(clamped.at(1.1)[0]));
  CHECK_THROWS_AS(aggregate_panel(trace, "bogus"), Error);
}

TEST_CASE("summary lists every temperature") {
  const Dataset data = synth::credit_like(5);
  const RunSpec spec = small_spec();
  const std::string s = summary_csv(run_experiment(data, spec).trace, spec);
  std::istringstream in(s);
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == spec.t_values.size());
}
