#pragma once

#include <memory>
#include <vector>

#include "peelkit/peeling/cell_system.hpp"

namespace peelkit::peeling {

/// Probability 2 W^(k) / (c_q^{2k} q_k) that a gasket face of half-degree k
/// carries a loop. Throws std::domain_error naming k when it exceeds 1.
double loop_probability(const boltzmann::PartitionTable& table, long k);

/// Checks loop_probability(k) <= 1 for k = 1..k_max; throws on the first failure.
void check_o2_admissible(const boltzmann::PartitionTable& table, long k_max);

struct DecorateOptions {
  long cutoff = 8;     // loops of half-degree below this are not recursed into
  int max_depth = 4;   // maximal loop nesting that is explored
  long k_check = 64;   // range checked up front by check_o2_admissible
};

/// Gasket exploration with its loops. Every hole of this gasket is enclosed by
/// `nesting` loops.
struct DecoratedSystem {
  struct Loop {
    std::size_t cell = 0;  // index of the gasket cell holding the face
    std::size_t face = 0;  // index into that cell's face list
    long half_degree = 0;
    std::unique_ptr<DecoratedSystem> interior;  // null below the cutoff or depth limit
  };

  CellSystem gasket;
  int nesting = 0;
  std::vector<Loop> loops;

  /// Loops at every depth, this level included.
  std::size_t total_loops() const;
  int max_nesting() const;
};

/// Turns faces of `cs` into loops independently, then explores the interior
/// of each large enough loop as a fresh gasket of perimeter k, recursively.
DecoratedSystem decorate_o2(const PeelingModel& model, CellSystem cs, Rng& rng, const DecorateOptions& options = {});

}  // namespace peelkit::peeling
