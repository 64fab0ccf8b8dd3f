#pragma once

// Cross-validated experiment harness: sweeps temperatures over stratified
// folds, boosts trees on (optionally noised) training folds, and records
// per-round traces, summaries, paired t-tests and plot data.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tada/dataset.hpp"

namespace tada {

enum class ClampedMode { both, on, off };

std::string to_string(ClampedMode mode);
ClampedMode parse_clamped_mode(const std::string& text);

struct RunSpec {
  std::filesystem::path data;
  std::string label_col = "last";
  std::vector<double> t_values{0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 1.0, 1.1};
  std::size_t iterations = 20;
  std::size_t tree_nodes = 15;
  std::size_t folds = 10;
  double eta = 0.0;
  ClampedMode clamped = ClampedMode::both;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::filesystem::path out = "results";
  std::size_t split_cap = 2000;
};

/// Throws invalid_argument on an unusable spec.
void validate(const RunSpec& spec);

/// One boosting round of one (fold, t) cell. Errors not evaluated for a
/// model variant (clamped mode, or clamping undefined at t > 1) are NaN.
struct TraceRow {
  std::size_t fold = 0;
  double t = 0.0;
  std::size_t j = 0;  // 1-based round
  double train_err = 0.0;
  double test_err_unclamped = 0.0;
  double test_err_clamped = 0.0;
  double min_codensity = 0.0;
  double max_codensity = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double z = 0.0;
  std::size_t m_dagger = 0;
  std::size_t infinite_weight_count = 0;
  double bound_factor = 0.0;
};

struct CellStatus {
  std::size_t fold = 0;
  double t = 0.0;
  bool ok = true;
  std::size_t rounds = 0;
  std::string error_code;  // empty when ok
  std::string message;
};

struct RunResult {
  std::vector<TraceRow> trace;     // sorted by (fold, t, j)
  std::vector<CellStatus> cells;   // sorted by (fold, t)
  double seconds = 0.0;

  bool complete() const;
};

/// Runs every (fold, t) cell on an in-memory dataset. Cells run on up to
/// spec.jobs threads; results do not depend on the thread count.
RunResult run_experiment(const Dataset& data, const RunSpec& spec);

/// Loads spec.data, runs the experiment and writes trace.csv, summary.csv,
/// config.json and plots/ under spec.out.
RunResult run(const RunSpec& spec);

std::string trace_csv(const std::vector<TraceRow>& trace);
std::string summary_csv(const std::vector<TraceRow>& trace, const RunSpec& spec);

/// Manifest: library version, seed, full spec and per-cell status.
std::string manifest_json(const RunSpec& spec, const RunResult& result, const Dataset& data);
RunSpec spec_from_manifest(const std::string& json_text);
RunSpec load_manifest(const std::filesystem::path& path);

enum class Comparison { better, equivalent, worse };
std::string to_string(Comparison c);

struct TTestResult {
  double statistic = 0.0;  // mean(a - b) / (sd / sqrt(n))
  double p_value = 1.0;    // two-sided
  std::size_t df = 0;
  Comparison outcome = Comparison::equivalent;
};

/// Two-sided paired Student t-test on error vectors; `better` means a has
/// significantly lower error than b at level alpha.
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha = 0.1);

/// Mean over folds per (t, j) of one trace column; NaNs are skipped.
/// Keys: t, then j - 1 indexes the vector (NaN where no fold reported).
using PanelData = std::map<double, std::vector<double>>;
PanelData aggregate_panel(const std::vector<TraceRow>& trace, const std::string& column);

/// Panel names handled by aggregate_panel and emit_plots.
const std::vector<std::string>& panel_columns();

/// Writes <dir>/<panel>.csv (tidy: j, t, mean) and <dir>/<panel>.svg per
/// panel. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<TraceRow>& trace,
                                              const std::filesystem::path& dir);

}  // namespace tada
