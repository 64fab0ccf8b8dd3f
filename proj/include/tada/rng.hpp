#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace tada {

/// Seedable generator with portable output: mt19937_64 is fully specified by
/// the standard, and the distributions below are implemented here rather
/// than taken from <random>, whose algorithms vary across libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed derived from a run seed and a list of stream
/// labels (fold index, temperature bits, purpose tag).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

/// Stream tags.
enum class Stream : std::uint64_t { folds = 1, noise = 2, splits = 3 };

}  // namespace tada
