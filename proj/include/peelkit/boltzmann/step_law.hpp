#pragma once

#include <memory>
#include <mutex>

#include <memory>
#include <string>
#include <vector>

#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/rng.hpp"

namespace peelkit::boltzmann {

enum class Mode { finite, infinite };
enum class Side { left, right };

/// Outcome of one peeling step.
///
/// C(k): the peeled edge reveals a new face of degree 2k.
/// G(side, j): the peeled edge is glued to another boundary edge, enclosing a
/// hole of half-perimeter j on `side`; that hole is filled in (swallowed).
/// "left" means the swallowed arc lies clockwise from the peeled edge.
struct PeelEvent {
  enum class Kind { C, G };
  Kind kind = Kind::C;
  long param = 1;  // k for C, j for G
  Side side = Side::left;

  static PeelEvent C(long k) { return {Kind::C, k, Side::left}; }
  static PeelEvent G(Side side, long j) { return {Kind::G, j, side}; }

  bool operator==(const PeelEvent&) const = default;
  std::string str() const;
};

/// Partition table plus per-perimeter caches needed for O(1) step laws.
class PeelingModel {
 public:
  explicit PeelingModel(PartitionTable table);

  const PartitionTable& table() const { return table_; }
  long cached_end() const { return table_.exact_end(); }

  /// Total probability of a G event at half-perimeter p.
  double swallow_mass(Mode mode, long p) const;
  /// Limit of the swallow mass as p → ∞.
  double swallow_limit() const { return swallow_limit_; }

  double h_up(long p) const;

 private:
  double direct_swallow_mass(Mode mode, long p) const;

  /// Swallow masses past the exact table on a geometric grid, built on first use.
  struct FarTable {
    std::once_flag once[2];
    std::vector<double> log_p[2];
    std::vector<double> g[2];
    double decay[2] = {1.0, 1.0};  // local exponent of g(p) - g(∞) at the last node
  };

  PartitionTable table_;
  double swallow_limit_ = 0.0;  // g(∞) = 2 Σ_a w_a / c in both modes
  std::shared_ptr<FarTable> far_ = std::make_shared<FarTable>();
  std::vector<double> h_up_;
  std::vector<double> g_finite_;
  std::vector<double> g_infinite_;
};

/// Peeling transition law at half-perimeter p.
///
/// Finite mode follows the locally-largest rule: the smaller of the two holes
/// is filled, with ties filled on the left.
class StepLaw {
 public:
  StepLaw(const PeelingModel& model, Mode mode, long p);

  Mode mode() const { return mode_; }
  long p() const { return p_; }

  double prob(const PeelEvent& event) const;
  double swallow_mass() const { return swallow_; }

  /// Total mass of C(k) for k > k_max.
  double growth_tail(long k_max) const;

  PeelEvent sample(Rng& rng) const;

 private:
  double growth_weight(long k) const;
  long sample_growth_tail(Rng& rng, long k_from) const;

  const PeelingModel* model_;
  Mode mode_;
  long p_;
  double swallow_;
  double base_;  // w(p) in finite mode, h_up(p) in infinite mode
};

StepLaw transition_law(const PeelingModel& model, Mode mode, long p);

}  // namespace peelkit::boltzmann
