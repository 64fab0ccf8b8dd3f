#include "tada/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "tada/booster.hpp"
#include "tada/errors.hpp"
#include "tada/rng.hpp"
#include "tada/tree.hpp"
#include "tada/version.hpp"

namespace tada {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

struct CellOutput {
  std::vector<TraceRow> rows;
  CellStatus status;
};

double error_rate(std::size_t wrong, std::size_t n) {
  return static_cast<double>(wrong) / static_cast<double>(n);
}

CellOutput run_cell(const Dataset& data, const Fold& fold, std::size_t fold_index, double t,
                    const RunSpec& spec) {
  CellOutput out;
  out.status.fold = fold_index;
  out.status.t = t;
  try {
    const TemperConfig cfg(t);
    const Dataset clean_train = data.subset(fold.train);
    const Dataset train =
        inject_label_noise(clean_train, spec.eta, derive_seed(spec.seed, {fold_index})).data;
    const Dataset test = data.subset(fold.test);

    TreeWeakLearner learner(
        {spec.tree_nodes, spec.split_cap},
        derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::splits), fold_index,
                                std::bit_cast<std::uint64_t>(t)}));
    BoostOptions options;
    options.iterations = spec.iterations;
    const BoostResult result = boost(train, learner, cfg, options);

    const bool want_unclamped = spec.clamped != ClampedMode::on;
    const bool want_clamped = spec.clamped != ClampedMode::off && (t <= 1.0 || cfg.is_classic());
    const double delta = cfg.is_classic() || t > 1.0 ? std::numeric_limits<double>::infinity()
                                                     : 1.0 / cfg.one_minus_t();

    std::vector<double> train_score(train.size(), 0.0);
    std::vector<double> test_score(test.size(), 0.0);
    std::vector<double> test_clamped(test.size(), 0.0);
    const auto& members = result.ensemble.members();
    for (std::size_t j = 0; j < members.size(); ++j) {
      const EnsembleMember& mem = members[j];
      const IterationRecord& rec = result.trace[j];
      std::size_t wrong_train = 0;
      for (std::size_t i = 0; i < train.size(); ++i) {
        train_score[i] += mem.alpha * mem.h->predict(train, i);
        wrong_train += sign_label(train_score[i]) != train.label(i);
      }
      std::size_t wrong = 0;
      std::size_t wrong_clamped = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        const double step = mem.alpha * mem.h->predict(test, i);
        test_score[i] += step;
        test_clamped[i] = std::clamp(test_clamped[i] + step, -delta, delta);
        wrong += sign_label(test_score[i]) != test.label(i);
        wrong_clamped += sign_label(test_clamped[i]) != test.label(i);
      }
      TraceRow row;
      row.fold = fold_index;
      row.t = t;
      row.j = j + 1;
      row.train_err = error_rate(wrong_train, train.size());
      row.test_err_unclamped = want_unclamped ? error_rate(wrong, test.size()) : kNaN;
      row.test_err_clamped = want_clamped ? error_rate(wrong_clamped, test.size()) : kNaN;
      row.min_codensity = rec.min_codensity;
      row.max_codensity = rec.max_codensity;
      row.rho = rec.rho;
      row.mu = rec.mu;
      row.alpha = rec.alpha;
      row.z = rec.z;
      row.m_dagger = rec.m_dagger;
      row.infinite_weight_count = rec.infinite_weight_count;
      row.bound_factor = rec.bound_factor;
      out.rows.push_back(row);
    }
    out.status.rounds = members.size();
    if (result.stopped) {
      out.status.ok = false;
      out.status.error_code = std::string(to_string(result.stopped->code()));
      out.status.message = result.stopped->what();
    }
  } catch (const Error& e) {
    out.status.ok = false;
    out.status.error_code = std::string(to_string(e.code()));
    out.status.message = e.what();
  }
  return out;
}

double field(const TraceRow& r, const std::string& column) {
  if (column == "train_err") return r.train_err;
  if (column == "test_err_unclamped") return r.test_err_unclamped;
  if (column == "test_err_clamped") return r.test_err_clamped;
  if (column == "min_codensity") return r.min_codensity;
  if (column == "max_codensity") return r.max_codensity;
  throw Error(ErrorCode::invalid_argument, "unknown trace column '" + column + "'");
}

struct MeanStd {
  double mean = kNaN;
  double sd = kNaN;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / (n - 1.0));
  return out;
}

// Final-round values of one column, keyed by fold, for a given t.
std::map<std::size_t, double> final_values(const std::vector<TraceRow>& trace, double t,
                                           std::size_t j_final, const std::string& column) {
  std::map<std::size_t, double> out;
  for (const auto& r : trace) {
    if (r.t == t && r.j == j_final) {
      const double v = field(r, column);
      if (!std::isnan(v)) out[r.fold] = v;
    }
  }
  return out;
}

std::string compare_cell(const std::map<std::size_t, double>& a,
                         const std::map<std::size_t, double>& b, double& p_out) {
  std::vector<double> va;
  std::vector<double> vb;
  for (const auto& [fold, x] : a) {
    const auto it = b.find(fold);
    if (it != b.end()) {
      va.push_back(x);
      vb.push_back(it->second);
    }
  }
  p_out = kNaN;
  if (va.size() < 2) return "NA";
  const TTestResult r = paired_ttest(va, vb);
  p_out = r.p_value;
  return to_string(r.outcome);
}

std::string svg_chart(const std::string& title, const PanelData& panel) {
  constexpr double kW = 640, kH = 400, kL = 60, kR = 120, kT = 40, kB = 40;
  static const std::array<const char*, 10> kColors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                   "#bcbd22", "#17becf"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t jmax = 1;
  for (const auto& [t, ys] : panel) {
    jmax = std::max(jmax, ys.size());
    for (const double y : ys) {
      if (std::isfinite(y)) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
  }
  if (!(lo <= hi)) lo = 0.0, hi = 1.0;
  if (hi == lo) hi = lo + 1.0;
  auto px = [&](std::size_t j) {
    return kL + (jmax > 1 ? (static_cast<double>(j) - 1.0) / static_cast<double>(jmax - 1) : 0.5) *
                    (kW - kL - kR);
  };
  auto py = [&](double y) { return kT + (hi - y) / (hi - lo) * (kH - kT - kB); };
  char buf[256];
  std::ostringstream s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n", kW,
                kH);
  s << buf << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"24\" font-size=\"16\">%s</text>\n", kL,
                title.c_str());
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<polyline points=\"%.1f,%.1f %.1f,%.1f %.1f,%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                kL, kT, kL, kH - kB, kW - kR, kH - kB);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"4\" y=\"%.1f\" font-size=\"11\">%.4g</text>\n"
                "<text x=\"4\" y=\"%.1f\" font-size=\"11\">%.4g</text>\n",
                py(hi) + 4, hi, py(lo) + 4, lo);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">j=1</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">j=%zu</text>\n",
                px(1) - 8, kH - kB + 16, px(jmax) - 12, kH - kB + 16, jmax);
  s << buf;
  std::size_t series = 0;
  for (const auto& [t, ys] : panel) {
    const char* color = kColors[series % kColors.size()];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    bool first = true;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!std::isfinite(ys[j])) continue;
      std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", first ? "" : " ", px(j + 1), py(ys[j]));
      s << buf;
      first = false;
    }
    s << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">t=%s</text>\n",
                  kW - kR + 10, kT + 16.0 * static_cast<double>(series), color, fmt(t).c_str());
    s << buf;
    ++series;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::string to_string(ClampedMode mode) {
  switch (mode) {
    case ClampedMode::both: return "both";
    case ClampedMode::on: return "on";
    case ClampedMode::off: return "off";
  }
  return "both";
}

ClampedMode parse_clamped_mode(const std::string& text) {
  if (text == "both") return ClampedMode::both;
  if (text == "on") return ClampedMode::on;
  if (text == "off") return ClampedMode::off;
  throw Error(ErrorCode::invalid_argument, "clamped must be both, on or off");
}

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::better: return "better";
    case Comparison::equivalent: return "equivalent";
    case Comparison::worse: return "worse";
  }
  return "equivalent";
}

void validate(const RunSpec& spec) {
  if (spec.t_values.empty()) throw Error(ErrorCode::invalid_argument, "no temperatures given");
  std::set<double> seen;
  for (const double t : spec.t_values) {
    if (!(t >= 0.0 && t < 2.0)) {
      throw Error(ErrorCode::invalid_argument, "temperatures must lie in [0, 2), got " + fmt(t));
    }
    if (!seen.insert(t).second) {
      throw Error(ErrorCode::invalid_argument, "temperature " + fmt(t) + " is listed twice");
    }
  }
  if (spec.iterations < 1) throw Error(ErrorCode::invalid_argument, "need at least one iteration");
  if (spec.folds < 2) throw Error(ErrorCode::invalid_argument, "need at least two folds");
  if (spec.tree_nodes < 1 || spec.tree_nodes % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "tree size must be odd and at least 1");
  }
  if (!(spec.eta >= 0.0 && spec.eta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "noise rate must lie in [0, 1)");
  }
  if (spec.jobs < 1) throw Error(ErrorCode::invalid_argument, "jobs must be at least 1");
  if (spec.split_cap < 1) throw Error(ErrorCode::invalid_argument, "split cap must be at least 1");
}

bool RunResult::complete() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellStatus& c) { return c.ok; });
}

RunResult run_experiment(const Dataset& data, const RunSpec& spec) {
  validate(spec);
  data.require_both_classes();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Fold> folds = stratified_folds(data, spec.folds, spec.seed);
  std::vector<double> ts = spec.t_values;
  std::sort(ts.begin(), ts.end());

  const std::size_t n_cells = folds.size() * ts.size();
  std::vector<CellOutput> outputs(n_cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < n_cells; c = next++) {
      const std::size_t f = c / ts.size();
      outputs[c] = run_cell(data, folds[f], f, ts[c % ts.size()], spec);
    }
  };
  const std::size_t n_threads = std::min(spec.jobs, n_cells);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }

  RunResult result;
  for (auto& out : outputs) {
    result.trace.insert(result.trace.end(), out.rows.begin(), out.rows.end());
    result.cells.push_back(std::move(out.status));
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string s =
      "fold,t,j,train_err,test_err_unclamped,test_err_clamped,min_codensity,max_codensity,"
      "rho_j,mu_j,alpha_j,Z_tj,m_dagger_j,infinite_weight_count,bound_factor\n";
  for (const auto& r : trace) {
    s += std::to_string(r.fold) + ',' + fmt(r.t) + ',' + std::to_string(r.j) + ',' +
         fmt(r.train_err) + ',' + fmt(r.test_err_unclamped) + ',' + fmt(r.test_err_clamped) +
         ',' + fmt(r.min_codensity) + ',' + fmt(r.max_codensity) + ',' + fmt(r.rho) + ',' +
         fmt(r.mu) + ',' + fmt(r.alpha) + ',' + fmt(r.z) + ',' + std::to_string(r.m_dagger) +
         ',' + std::to_string(r.infinite_weight_count) + ',' + fmt(r.bound_factor) + '\n';
  }
  return s;
}

std::string summary_csv(const std::vector<TraceRow>& trace, const RunSpec& spec) {
  std::vector<double> ts = spec.t_values;
  std::sort(ts.begin(), ts.end());
  const std::size_t jf = spec.iterations;
  const bool has_reference = std::find(ts.begin(), ts.end(), 1.0) != ts.end();
  std::string s =
      "t,folds,train_err_mean,train_err_std,test_err_unclamped_mean,test_err_unclamped_std,"
      "test_err_clamped_mean,test_err_clamped_std,min_codensity_mean,max_codensity_mean,"
      "unclamped_vs_t1_p,unclamped_vs_t1,clamped_vs_t1_p,clamped_vs_t1\n";
  for (const double t : ts) {
    auto values = [&](const std::string& col) {
      std::vector<double> v;
      for (const auto& [fold, x] : final_values(trace, t, jf, col)) v.push_back(x);
      return v;
    };
    const auto train = mean_std(values("train_err"));
    const auto unc = mean_std(values("test_err_unclamped"));
    const auto cl = mean_std(values("test_err_clamped"));
    const auto mn = mean_std(values("min_codensity"));
    const auto mx = mean_std(values("max_codensity"));
    std::string cmp_u = "NA";
    std::string cmp_c = "NA";
    double p_u = kNaN;
    double p_c = kNaN;
    if (has_reference) {
      cmp_u = compare_cell(final_values(trace, t, jf, "test_err_unclamped"),
                           final_values(trace, 1.0, jf, "test_err_unclamped"), p_u);
      cmp_c = compare_cell(final_values(trace, t, jf, "test_err_clamped"),
                           final_values(trace, 1.0, jf, "test_err_clamped"), p_c);
    }
    s += fmt(t) + ',' + std::to_string(values("train_err").size()) + ',' + fmt(train.mean) +
         ',' + fmt(train.sd) + ',' + fmt(unc.mean) + ',' + fmt(unc.sd) + ',' + fmt(cl.mean) +
         ',' + fmt(cl.sd) + ',' + fmt(mn.mean) + ',' + fmt(mx.mean) + ',' + fmt(p_u) + ',' +
         cmp_u + ',' + fmt(p_c) + ',' + cmp_c + '\n';
  }
  return s;
}

std::string manifest_json(const RunSpec& spec, const RunResult& result, const Dataset& data) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = "tada";
  j["version"] = kVersion;
  j["seed"] = spec.seed;
  j["spec"] = {{"data", spec.data.string()},
               {"label_col", spec.label_col},
               {"t_values", spec.t_values},
               {"iterations", spec.iterations},
               {"tree_nodes", spec.tree_nodes},
               {"folds", spec.folds},
               {"eta", spec.eta},
               {"clamped", to_string(spec.clamped)},
               {"seed", spec.seed},
               {"jobs", spec.jobs},
               {"out", spec.out.string()},
               {"split_cap", spec.split_cap}};
  j["dataset"] = {{"m", data.size()},
                  {"d", data.feature_count()},
                  {"label_column", data.label_column()},
                  {"negative_label", data.label_names().first},
                  {"positive_label", data.label_names().second}};
  ordered_json cells = ordered_json::array();
  for (const auto& c : result.cells) {
    ordered_json cell = {{"fold", c.fold}, {"t", c.t}, {"status", c.ok ? "ok" : "failed"},
                         {"rounds", c.rounds}};
    if (!c.ok) {
      cell["error"] = c.error_code;
      cell["message"] = c.message;
    }
    cells.push_back(cell);
  }
  j["complete"] = result.complete();
  j["cells"] = cells;
  j["seconds"] = result.seconds;
  return j.dump(2) + "\n";
}

RunSpec spec_from_manifest(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("manifest: ") + e.what());
  }
  if (!j.contains("spec") || !j["spec"].is_object()) {
    throw Error(ErrorCode::parse, "manifest has no spec object");
  }
  const auto& s = j["spec"];
  RunSpec spec;
  try {
    spec.data = s.value("data", spec.data.string());
    spec.label_col = s.value("label_col", spec.label_col);
    spec.t_values = s.value("t_values", spec.t_values);
    spec.iterations = s.value("iterations", spec.iterations);
    spec.tree_nodes = s.value("tree_nodes", spec.tree_nodes);
    spec.folds = s.value("folds", spec.folds);
    spec.eta = s.value("eta", spec.eta);
    spec.clamped = parse_clamped_mode(s.value("clamped", to_string(spec.clamped)));
    spec.seed = s.value("seed", spec.seed);
    spec.jobs = s.value("jobs", spec.jobs);
    spec.out = s.value("out", spec.out.string());
    spec.split_cap = s.value("split_cap", spec.split_cap);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("manifest: ") + e.what());
  }
  return spec;
}

RunSpec load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return spec_from_manifest(buf.str());
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::invalid_argument, "paired t-test needs equal fold counts");
  }
  if (a.size() < 2) throw Error(ErrorCode::invalid_argument, "paired t-test needs two pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const MeanStd ms = mean_std(d);
  TTestResult r;
  r.df = d.size() - 1;
  if (ms.sd == 0.0) {
    r.statistic = ms.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ms.mean);
    r.p_value = ms.mean == 0.0 ? 1.0 : 0.0;
  } else {
    r.statistic = ms.mean / (ms.sd / std::sqrt(static_cast<double>(d.size())));
    const boost::math::students_t dist(static_cast<double>(r.df));
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  }
  if (r.p_value < alpha) r.outcome = ms.mean < 0.0 ? Comparison::better : Comparison::worse;
  return r;
}

const std::vector<std::string>& panel_columns() {
  static const std::vector<std::string> kPanels{"train_err", "test_err_unclamped",
                                                "test_err_clamped", "min_codensity",
                                                "max_codensity"};
  return kPanels;
}

PanelData aggregate_panel(const std::vector<TraceRow>& trace, const std::string& column) {
  std::map<double, std::vector<std::pair<double, std::size_t>>> acc;
  for (const auto& r : trace) {
    auto& series = acc[r.t];
    if (series.size() < r.j) series.resize(r.j, {0.0, 0});
    const double v = field(r, column);
    if (std::isnan(v)) continue;
    series[r.j - 1].first += v;
    series[r.j - 1].second += 1;
  }
  PanelData out;
  for (const auto& [t, series] : acc) {
    auto& ys = out[t];
    for (const auto& [sum, n] : series) ys.push_back(n > 0 ? sum / static_cast<double>(n) : kNaN);
  }
  return out;
}

std::vector<std::filesystem::path> emit_plots(const std::vector<TraceRow>& trace,
                                              const std::filesystem::path& dir) {
  if (trace.empty()) throw Error(ErrorCode::invalid_argument, "emit_plots: empty trace");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& panel : panel_columns()) {
    const PanelData data = aggregate_panel(trace, panel);
    std::string csv = "j,t,mean\n";
    for (const auto& [t, ys] : data) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        csv += std::to_string(j + 1) + ',' + fmt(t) + ',' + fmt(ys[j]) + '\n';
      }
    }
    const auto csv_path = dir / (panel + ".csv");
    const auto svg_path = dir / (panel + ".svg");
    write_file(csv_path, csv);
    write_file(svg_path, svg_chart(panel, data));
    written.push_back(csv_path);
    written.push_back(svg_path);
  }
  return written;
}

RunResult run(const RunSpec& spec) {
  validate(spec);
  const Dataset data = load_csv(spec.data, spec.label_col);
  RunResult result = run_experiment(data, spec);
  std::filesystem::create_directories(spec.out);
  write_file(spec.out / "trace.csv", trace_csv(result.trace));
  write_file(spec.out / "summary.csv", summary_csv(result.trace, spec));
  write_file(spec.out / "config.json", manifest_json(spec, result, data));
  if (!result.trace.empty()) emit_plots(result.trace, spec.out / "plots");
  return result;
}

}  // namespace tada
