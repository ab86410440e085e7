#pragma once

#include <cstddef>
#include <vector>

#include "peelkit/levy/jump_path.hpp"

namespace peelkit::levy {

/// Paths with importance weights. `second` is empty for single-path ensembles.
struct WeightedEnsemble {
  std::vector<JumpPath> first;
  std::vector<JumpPath> second;
  std::vector<double> weights;  // unnormalized; 0 exactly on paths leaving (0, ∞)
  double eps_cut = 0.0;
  int retries = 0;

  std::size_t size() const { return weights.size(); }
  double total_weight() const;
  double mean_weight() const;
  /// Kish effective sample size (Σw)^2 / Σw^2.
  double ess() const;
  /// Weights rescaled to sum to 1.
  std::vector<double> normalized() const;
};

struct UpsilonOptions {
  double eps_cut = 0.01;
  int max_retries = 4;  // each retry halves eps_cut
};

/// Cauchy paths from 1 with Lévy measure dx/x^2 on [0, horizon], weighted by
/// sqrt(S(horizon)) on {S > 0 throughout}. Self-normalized, this represents
/// the Cauchy process conditioned to stay positive.
WeightedEnsemble sample_upsilon_up(double horizon, std::size_t n, Rng& rng, const UpsilonOptions& options = {});

/// Pairs of independent Cauchy paths with Lévy measure dx/(2x^2) from (x, y),
/// weighted by ((x + y) / (L_t + R_t))^2 when both stay positive on [0, t].
WeightedEnsemble doob_pair_ensemble(double x, double y, double t, std::size_t n, Rng& rng, double eps_cut = 0.01);

}  // namespace peelkit::levy
