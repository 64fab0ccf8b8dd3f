// Command-line front end of the experiment harness.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "tada/errors.hpp"
#include "tada/experiment.hpp"
#include "tada/version.hpp"

int main(int argc, char** argv) {
  tada::RunSpec spec;
  std::string clamped = "both";
  std::string manifest;
  std::string data;
  std::string out;

  CLI::App app{"Tempered boosting experiments with cross-validated traces"};
  app.set_version_flag("--version", tada::kVersion);
  auto* data_opt = app.add_option("--data", data, "CSV dataset with a header row");
  app.add_option("--label-col", spec.label_col, "Label column name or 'last'");
  app.add_option("--t", spec.t_values, "Comma-separated temperatures in [0, 2)")->delimiter(',');
  app.add_option("--iters", spec.iterations, "Boosting rounds J");
  app.add_option("--tree-nodes", spec.tree_nodes, "Nodes per tree (odd)");
  app.add_option("--folds", spec.folds, "Cross-validation folds");
  app.add_option("--noise", spec.eta, "Training label noise rate");
  app.add_option("--clamped", clamped, "Models to evaluate")
      ->check(CLI::IsMember({"both", "on", "off"}));
  app.add_option("--seed", spec.seed, "Run seed");
  app.add_option("--jobs", spec.jobs, "Worker threads");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  app.add_option("--split-cap", spec.split_cap, "Split candidates evaluated per expansion");
  auto* manifest_opt =
      app.add_option("--manifest", manifest, "Rerun the spec stored in a config.json");
  manifest_opt->excludes(data_opt);
  CLI11_PARSE(app, argc, argv);

  try {
    if (!manifest.empty()) {
      const std::string keep_out = out;
      spec = tada::load_manifest(manifest);
      if (!keep_out.empty()) spec.out = keep_out;
    } else {
      if (data.empty()) {
        std::cerr << "error: --data or --manifest is required\n";
        return 1;
      }
      spec.data = data;
      spec.clamped = tada::parse_clamped_mode(clamped);
      if (*out_opt) spec.out = out;
    }
    const tada::RunResult result = tada::run(spec);
    std::size_t failed = 0;
    for (const auto& cell : result.cells) {
      if (!cell.ok) {
        ++failed;
        std::cerr << "cell fold=" << cell.fold << " t=" << cell.t << " failed after "
                  << cell.rounds << " rounds: " << cell.error_code << ": " << cell.message
                  << "\n";
      }
    }
    std::printf("%zu cells, %zu failed, %.2f s; results in %s\n", result.cells.size(), failed,
                result.seconds, spec.out.string().c_str());
    return failed == 0 ? 0 : 2;
  } catch (const tada::Error& e) {
    std::cerr << "error (" << tada::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
