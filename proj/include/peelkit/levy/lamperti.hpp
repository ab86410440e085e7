#pragma once

#include <limits>
#include <vector>

#include "peelkit/levy/jump_path.hpp"

namespace peelkit::levy {

/// Jump of a Lamperti transform X.
struct XJump {
  double t = 0.0;        // X-time
  double xi_time = 0.0;  // ξ-time of the jump
  double level = 0.0;    // X just before the jump
  double size = 0.0;     // ΔX
  long index = 0;        // ordinal among the jumps of ξ
};

/// X^(α)(t) = x exp(ξ(τ(t x^α))) with τ(u) = inf{r : ∫_0^r e^{-αξ} >= u}.
struct LampertiResult {
  double alpha = 0.0;
  double x = 1.0;
  std::vector<double> grid;
  std::vector<double> values;  // 0 after the lifetime; NaN where the path did not reach
  std::vector<double> tau;     // ξ-time at each grid time; +inf after the lifetime
  double zeta = std::numeric_limits<double>::infinity();
  bool zeta_finite = false;
  double zeta_error = 0.0;     // estimate of the truncated part of ζ
  bool extrapolated = false;   // continued past the given path by its drift alone
  bool stopped_low = false;    // stopped at the configured stop level
  bool hit_limit = false;      // ran into max_xi_time
  double xi_time = 0.0;        // ξ-time consumed
  long xi_jumps = 0;
  std::vector<XJump> jumps;    // recorded jumps of X
};

/// Transform of a given ξ path. Past the path horizon ξ is continued by its
/// drift alone, which gives ζ = x e^{ξ(h)}/|b| + ... for a negative slope b.
LampertiResult lamperti(const JumpPath& xi, double alpha, double x, const std::vector<double>& t_grid);

struct LampertiOptions {
  double eps_cut = 0.01;
  bool gaussian = false;
  /// α = -1: keep sampling until the remaining part of ζ, bounded through the
  /// envelope E ∫_s^∞ e^{ξ} = e^{ξ(s)} π/2, is below zeta_rel_tol ζ.
  bool need_zeta = false;
  double zeta_rel_tol = 1e-6;
  bool record_jumps = false;
  double jump_threshold = 0.0;  // record jumps with |ΔX| >= threshold
  double record_until = std::numeric_limits<double>::infinity();  // X-time
  /// Stop once X falls below this level (0: never).
  double stop_level = 0.0;
  double max_xi_time = 1e4;
};

/// Samples ξ on demand and transforms it, extending the path until the grid is
/// covered and, for α = -1 with need_zeta, until ζ has converged.
LampertiResult sample_lamperti(double alpha, double x, const std::vector<double>& t_grid, Rng& rng,
                               const LampertiOptions& options = {});

}  // namespace peelkit::levy
