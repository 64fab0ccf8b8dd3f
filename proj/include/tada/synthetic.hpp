#pragma once

// Seeded synthetic datasets shaped like small UCI domains, used by the
// acceptance suite and the dataset generator tool.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tada/dataset.hpp"

namespace tada::synth {

/// 208 x 60 numeric features in [0, 1]; 111/97 classes driven by a few
/// smooth band patterns plus noise.
Dataset sonar_like(std::uint64_t seed);

/// 351 x 34 numeric features in [-1, 1] with a nonlinear boundary.
Dataset ionosphere_like(std::uint64_t seed);

/// 300 examples, 6 numeric and 3 categorical features.
Dataset credit_like(std::uint64_t seed);

/// m points in d dimensions separated by a hyperplane with a margin.
Dataset linearly_separable(std::size_t m, std::size_t d, std::uint64_t seed);

/// Names accepted by by_name.
const std::vector<std::string>& names();
Dataset by_name(const std::string& name, std::uint64_t seed);

}  // namespace tada::synth
