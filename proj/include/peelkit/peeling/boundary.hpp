#pragma once

#include <string>
#include <utility>
#include <vector>

#include "peelkit/boltzmann/step_law.hpp"

namespace peelkit::peeling {

using boltzmann::Mode;
using boltzmann::PeelEvent;
using boltzmann::Side;

enum class Algorithm { uniform, layers };

/// Boundary of the explored region under peeling by layers.
///
/// Edges at height h (low) form one contiguous arc and the rest sit at h + 1
/// (high). The cyclic word is therefore determined by (p, h, m) with m the
/// number of low edges; the peel cursor is the first edge of the low arc,
/// which is word position 0.
struct LayeredBoundary {
  long p = 0;
  long h = 0;
  long m = 0;

  static LayeredBoundary root(long ell);
  bool absorbed() const { return p == 0; }

  /// Explicit word starting at the cursor; true = low.
  std::vector<bool> word() const;

  bool operator==(const LayeredBoundary&) const = default;
};

struct StepOutcome {
  long height_increment = 0;
  long swallowed = -1;   // half-perimeter of the filled hole, -1 if none
  long face_degree = 0;  // degree of the discovered face, 0 if none
  bool absorbed = false;
};

/// Applies one event. Finite mode requires the filled hole to be the smaller
/// one (j <= p-1-j); infinite mode requires the retained side to be non-empty.
std::pair<LayeredBoundary, StepOutcome> peel_step(const LayeredBoundary& state, const PeelEvent& event, Mode mode);

/// Debug boundary carrying the full label word. Used to cross-check the
/// compressed representation and hypothesis (H).
class ExplicitBoundary {
 public:
  explicit ExplicitBoundary(long ell);

  StepOutcome apply(const PeelEvent& event, Mode mode);

  long p() const { return static_cast<long>(labels_.size()) / 2; }
  long h() const { return h_; }
  long low_count() const;
  const std::vector<bool>& labels() const { return labels_; }

  /// Low edges form a single cyclic arc that starts at the cursor.
  bool low_arc_contiguous() const;

 private:
  void normalize();

  std::vector<bool> labels_;  // cursor at index 0
  long h_ = 0;
};

}  // namespace peelkit::peeling
