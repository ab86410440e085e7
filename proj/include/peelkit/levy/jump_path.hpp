#pragma once

#include <vector>

#include "peelkit/rng.hpp"

namespace peelkit::levy {

struct Jump {
  double time = 0.0;
  double size = 0.0;
  bool surrogate = false;  // Gaussian stand-in for the dropped small jumps
};

/// Piecewise-linear path with jumps:
/// value(t) = start + (drift + compensation) t + Σ_{s <= t} jumps, right-continuous.
struct JumpPath {
  double start = 0.0;
  double horizon = 0.0;
  double drift = 0.0;
  double compensation = 0.0;
  double eps_cut = 0.0;
  std::vector<Jump> jumps;  // strictly increasing times in (0, horizon]

  double slope() const { return drift + compensation; }
  double value(double t) const;
  double left_limit(double t) const;
  double terminal() const { return value(horizon); }

  /// Infimum over [0, horizon]; attained at a jump time, 0 or the horizon.
  double infimum() const;
};

/// ξ with jumps |y| > eps_cut, drift −2/π and the matching compensation.
/// With `gaussian`, the dropped small jumps are replaced by Gaussian
/// increments of the same variance, one midway between consecutive jumps.
JumpPath sample_xi(double horizon, double eps_cut, Rng& rng, bool gaussian = false);

/// Symmetric Cauchy process from `start` with Lévy measure c dx/x^2, c = 1/2
/// when `half`, else 1. Jumps below eps_cut are dropped; by symmetry no
/// compensation is needed.
JumpPath sample_cauchy(double start, double horizon, double eps_cut, Rng& rng, bool half);

/// Throws unless eps_cut lies in (0, 0.1].
void check_eps_cut(double eps_cut);

}  // namespace peelkit::levy
