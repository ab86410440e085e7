#pragma once

#include "peelkit/rng.hpp"

namespace peelkit::levy {

/// Lévy measure Λ₁ of ξ in the log variable y = log x:
/// λ(y) = e^{-y} / (π (1 - e^y)^2) on (-log 2, 0) ∪ (0, ∞).
double lambda1_density(double y);

/// Λ₁((eps, ∞)).
double lambda1_mass_right(double eps);

/// Λ₁((-log 2, -eps)); zero for eps >= log 2.
double lambda1_mass_left(double eps);

/// ∫_{|y|>eps} (e^y - 1) Λ₁(dy), each side in closed form.
double lambda1_exp_moment_outside(double eps);

/// ∫_{|y|<eps} (e^y - 1 - y) Λ₁(dy).
double lambda1_small_exp_defect(double eps);

/// ∫_{|y|<eps} y^2 Λ₁(dy).
double lambda1_small_variance(double eps);

/// Linear drift of ξ stated with (e^y - 1) compensation.
inline constexpr double kXiDrift = -0.63661977236758134308;  // -2/π

/// Drift that replaces the compensation once jumps with |y| <= eps are dropped:
/// the compensator of the retained jumps plus the mean of the dropped ones.
double xi_compensation(double eps);

/// Inverse-CDF samplers for Λ₁ restricted to y > eps and to y < -eps.
double sample_lambda1_right(double eps, Rng& rng);
double sample_lambda1_left(double eps, Rng& rng);

/// Streaming compound-Poisson generator of the jumps of ξ with |y| > eps.
class XiJumpSource {
 public:
  explicit XiJumpSource(double eps);

  double eps() const { return eps_; }
  double rate() const { return rate_; }
  /// Total drift per unit time of the truncated process.
  double drift() const { return drift_; }
  double small_variance() const { return small_var_; }

  /// Waiting time to the next jump.
  double next_wait(Rng& rng) const { return rng.exponential() / rate_; }
  double next_size(Rng& rng) const;

 private:
  double eps_;
  double right_;
  double left_;
  double rate_;
  double drift_;
  double small_var_;
};

}  // namespace peelkit::levy
