#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "peelkit/boltzmann/step_law.hpp"
#include "peelkit/peeling/boundary.hpp"
#include "peelkit/rng.hpp"

namespace peelkit::peeling {

using boltzmann::PeelingModel;

struct FaceRecord {
  long degree = 0;
  long step = 0;    // step index n at which the face was discovered (P(n) -> P(n+1))
  long height = 0;  // layer height h before the step
};

/// One peeling exploration. P, H and T have one more entry than events.
/// H is only maintained by the layers algorithm and stays 0 under uniform peeling.
struct ExplorationTrace {
  std::vector<long> P;
  std::vector<long> H;
  std::vector<double> T;
  std::vector<PeelEvent> events;
  std::vector<FaceRecord> faces;
  bool absorbed = false;

  long steps() const { return static_cast<long>(events.size()); }
};

/// Replace the sampled events or the exponential clock increments, or stop early.
struct ExplorationHooks {
  std::function<PeelEvent(const LayeredBoundary&, Rng&)> event_source;
  std::function<double(Rng&)> clock_source;
  std::function<bool(const LayeredBoundary&)> stop;  // checked before each step
};

/// Hard ceiling on the half-perimeter a simulation may reach.
inline constexpr long kPerimeterCeiling = 1L << 40;

ExplorationTrace run_exploration(const PeelingModel& model, long ell, Algorithm algo, Mode mode, Rng& rng,
                                 long max_steps = std::numeric_limits<long>::max(),
                                 const ExplorationHooks* hooks = nullptr);

/// CSV with columns step, P, H, T, event_kind, event_param, face_degree. Row n
/// holds the state before step n and the event applied at step n; the last row
/// has no event.
void write_trace_csv(const ExplorationTrace& trace, std::ostream& out);

}  // namespace peelkit::peeling
