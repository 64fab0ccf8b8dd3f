// Writes the synthetic benchmark datasets as CSV files.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "tada/errors.hpp"
#include "tada/synthetic.hpp"

int main(int argc, char** argv) {
  std::string name = "all";
  std::string dir = ".";
  std::uint64_t seed = 1;
  CLI::App app{"Generate synthetic UCI-shaped datasets"};
  app.add_option("--name", name, "sonar, ionosphere, credit or all");
  app.add_option("--out", dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    std::filesystem::create_directories(dir);
    for (const auto& n : tada::synth::names()) {
      if (name != "all" && name != n) continue;
      const auto path = std::filesystem::path(dir) / (n + ".csv");
      tada::write_csv(tada::synth::by_name(n, seed), path);
      std::cout << path.string() << "\n";
    }
  } catch (const tada::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
