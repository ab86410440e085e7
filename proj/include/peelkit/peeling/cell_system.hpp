#pragma once

#include <string>
#include <vector>

#include "peelkit/peeling/exploration.hpp"
#include "peelkit/ulam.hpp"

namespace peelkit::peeling {

struct SwallowRecord {
  long step = 0;
  long size = 0;
};

struct Cell {
  UlamLabel label;
  long perimeter = 0;
  std::vector<long> P;
  std::vector<long> H;
  long birth_time = 0;    // B_u
  long birth_height = 0;  // H~_u
  long parent_jump = -1;  // N_u: local step of the parent at which u was swallowed
  std::vector<FaceRecord> faces;
  std::vector<SwallowRecord> swallows;  // every G event, tracked or not
  std::vector<std::size_t> children;    // indices into CellSystem::cells, in label order
  bool absorbed = false;

  long max_height() const { return H.empty() ? 0 : H.back(); }
};

struct CellSystemOptions {
  /// Stop a cell once its global height exceeds this value (negative: no limit).
  long max_global_height = -1;
  /// Guard against runaway trees.
  std::size_t max_cells = 10'000'000;
};

/// Branching peeling exploration on the Ulam tree. Cells are stored in
/// breadth-first order; the root is cells[0].
struct CellSystem {
  long cutoff = 1;
  Algorithm algo = Algorithm::layers;
  std::vector<Cell> cells;

  const Cell& root() const { return cells.front(); }
  const Cell* find(const UlamLabel& u) const;

  /// Deterministic JSON serialization with cells keyed by Ulam label.
  std::string to_json() const;
};

CellSystem run_cell_system(const PeelingModel& model, long ell, Algorithm algo, long cutoff, Rng& rng,
                           const CellSystemOptions& options = {});

/// Half-perimeters of the cells alive at global height r, non-increasing:
/// the root when r <= its final height, and every child with birth height
/// < r <= birth height + final local height, each read at its first local step
/// of global height r. Cells below the cutoff were never explored and
/// contribute nothing.
std::vector<long> ball_perimeters(const CellSystem& cs, long r);

}  // namespace peelkit::peeling
