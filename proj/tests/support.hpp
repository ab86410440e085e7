#pragma once

#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/boltzmann/step_law.hpp"

namespace peelkit::testing {

/// Preset model at L_max = 256, solved once per test binary.
inline const boltzmann::PeelingModel& small_model() {
  static const boltzmann::PeelingModel model(
      boltzmann::solve_partition_function(boltzmann::WeightSequence::preset("budd-o2-example"), 256));
  return model;
}

}  // namespace peelkit::testing
