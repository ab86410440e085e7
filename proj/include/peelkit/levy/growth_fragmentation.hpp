#pragma once

#include <cstddef>
#include <vector>

#include "peelkit/levy/lamperti.hpp"
#include "peelkit/ulam.hpp"

namespace peelkit::levy {

struct GFCell {
  UlamLabel label;
  double start = 0.0;           // size at birth
  double birth_time = 0.0;      // global time b_u
  double birth_distance = 0.0;  // ξ-time accumulated along the ancestors up to the birth
  long parent = -1;             // index of the parent cell, -1 for the root
  std::vector<double> values;   // on the global grid; 0 before birth and after death
  double zeta = 0.0;            // lifetime, +inf if unknown
  bool zeta_finite = false;
  std::vector<XJump> jumps;     // jumps with |ΔX| >= δ, local times
  std::vector<std::size_t> children;
};

/// Multiset of alive cell sizes at one grid time, non-increasing.
struct GFState {
  double t = 0.0;
  std::vector<double> sizes;
  std::vector<std::size_t> cells;  // parallel to sizes
};

struct GFOptions {
  /// Upper bound for the ξ truncation. A cell of start size y uses
  /// min(eps_cut, resolution / y), so jumps of X below about `resolution` may
  /// be dropped. 0 means resolution = δ/4.
  double eps_cut = 0.01;
  double resolution = 0.0;
  bool gaussian = false;
  /// α = -1: follow every cell to the end of its life, not just to the last grid time.
  bool full_lifetime = false;
  double report_threshold = 0.0;
  std::size_t max_cells = 1'000'000;
};

struct GFResult {
  double alpha = 0.0;
  double delta = 0.0;
  std::vector<double> grid;
  std::vector<GFCell> cells;  // breadth-first; cells[0] is the root
  std::vector<GFState> states;
};

/// Self-similar growth-fragmentation: the root follows X^(α) from x and each
/// negative jump of size >= δ starts an independent cell of that size, up to
/// the last grid time. Children are labelled by decreasing size. The stream
/// of a child is keyed by the ordinal of the parent's ξ jump that created it,
/// so runs at δ and δ/2 from one seed share every cell of size >= δ.
GFResult growth_fragmentation(double x, double alpha, const std::vector<double>& t_grid, double delta, Rng& rng,
                              const GFOptions& options = {});

}  // namespace peelkit::levy
