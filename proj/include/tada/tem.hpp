#pragma once

// Tempered exponential measures over a finite sample: weight vectors on the
// co-simplex {q >= 0 : sum q^{2-t} = 1}, their co-densities, the tempered
// relative entropy and the entropy projection that drives boosting.

#include <cstddef>
#include <span>
#include <vector>

#include "tada/t_algebra.hpp"

namespace tada {

/// A vector on the co-simplex for a given temperature. Immutable; every
/// operation returns a fresh value.
class TemWeights {
 public:
  static constexpr double kCoSimplexTolerance = 1e-9;

  /// Validates nonnegativity and co-simplex membership.
  TemWeights(std::vector<double> q, TemperConfig cfg);

  std::size_t size() const noexcept { return q_.size(); }
  std::span<const double> values() const noexcept { return q_; }
  double operator[](std::size_t i) const { return q_[i]; }
  const TemperConfig& cfg() const noexcept { return cfg_; }

  /// Indices i with q_i == 0 (switched-off examples).
  const std::vector<std::size_t>& dagger_set() const noexcept { return dagger_; }

  /// |sum q^{2-t} - 1|.
  double co_simplex_residual() const;

 private:
  std::vector<double> q_;
  TemperConfig cfg_;
  std::vector<std::size_t> dagger_;
};

/// Probability vector p = q^{2-t} derived from a TemWeights.
struct CoDensity {
  std::vector<double> p;
};

TemWeights uniform_init(std::size_t m, const TemperConfig& cfg);

CoDensity co_density(const TemWeights& q);

/// Bregman divergence with generator z log_t z - log_{t-1} z.
double tempered_relative_entropy(const TemWeights& q_new, const TemWeights& q_old);

/// exp_t(log_t q_i - mu u_i) before normalization, with log_t(0) = -1/(1-t)
/// for t < 1. Components on the t > 1 singular branch are +inf and counted.
struct UnnormalizedUpdate {
  std::vector<double> w;
  std::size_t infinite_count = 0;
};

UnnormalizedUpdate unnormalized_update(const TemWeights& q, std::span<const double> u,
                                       double mu);

/// Z_t(mu) = || exp_t(log_t q - mu u) ||_{2-t}; +inf when a component is.
double normalizer(const TemWeights& q, std::span<const double> u, double mu);

struct UpdateResult {
  TemWeights q;
  double z;
};

/// q'_i = exp_t(log_t q_i - mu u_i) / Z_t.
UpdateResult tempered_update(const TemWeights& q, std::span<const double> u, double mu);

struct Projection {
  double mu;
  TemWeights q;
  double z;
  int iterations;
};

/// Exact minimizer of the tempered relative entropy over the co-simplex
/// subject to q'^T u = 0, found as the unique root of q'(mu)^T u.
Projection solve_projection(const TemWeights& q, std::span<const double> u);

}  // namespace tada
