#pragma once

// The tempered family of losses for class probability estimation: partial
// losses, pointwise conditional risk, Bayes risk and numeric properness
// checks. Temperatures range over [-inf, 2).

#include <span>
#include <vector>

#include "tada/t_algebra.hpp"

namespace tada {

/// Partial loss of the positive class, ((1-u)/M_{1-t}(u, 1-u))^{2-t}.
/// At t = -inf this is 2 [u < 1/2] + [u = 1/2], the pointwise limit.
double partial_loss_pos(double u, const TemperConfig& cfg);

/// Partial loss of the negative class: partial_loss_pos(1 - u).
double partial_loss_neg(double u, const TemperConfig& cfg);

/// v * l_1(u) + (1 - v) * l_{-1}(u).
double pointwise_risk(double u, double v, const TemperConfig& cfg);

/// 2 v (1 - v) / M_{1-t}(v, 1 - v); 2 min(v, 1 - v) at t = -inf.
double bayes_risk(double v, const TemperConfig& cfg);

/// Loss bundle for a fixed temperature.
class CpeLoss {
 public:
  explicit CpeLoss(TemperConfig cfg);

  const TemperConfig& cfg() const noexcept { return cfg_; }
  double partial_pos(double u) const { return partial_loss_pos(u, cfg_); }
  double partial_neg(double u) const { return partial_loss_neg(u, cfg_); }
  double risk(double u, double v) const { return pointwise_risk(u, v, cfg_); }
  double bayes(double v) const { return bayes_risk(v, cfg_); }

 private:
  TemperConfig cfg_;
};

struct ProperViolation {
  double v = 0.0;
  double argmin = 0.0;
  /// true: minimizer farther than one grid step from v (or v not a minimizer
  /// at t = -inf); false: the minimizer is not unique.
  bool misplaced = false;
};

struct ProperReport {
  bool strict_checked = false;  // false at t = -inf (properness only)
  std::vector<ProperViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// For every v, scans pointwise_risk(., v) over u_grid: the minimizer must sit
/// within one grid step of v and, for finite t, be unique within three grid
/// steps. At t = -inf only checks that v attains the minimum.
ProperReport check_strict_properness(const TemperConfig& cfg, std::span<const double> v_grid,
                                     std::span<const double> u_grid);

/// Evenly spaced grid lo, lo + step, ..., hi (inclusive up to rounding).
std::vector<double> make_grid(double lo, double hi, double step);

/// Temperature t in [-inf, 2] with bayes_risk(u) = z; -inf at the lower end
/// z = 2 min(u, 1-u). Returned as a double (possibly -inf or 2).
double bayes_risk_coverage(double u, double z);

}  // namespace tada
