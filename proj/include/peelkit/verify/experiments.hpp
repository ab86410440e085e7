#pragma once

#include <ostream>

#include "peelkit/boltzmann/step_law.hpp"
#include "peelkit/verify/config.hpp"
#include "peelkit/verify/parallel.hpp"
#include "peelkit/verify/report.hpp"

namespace peelkit::verify {

struct RunContext {
  Execution exec = Execution::parallel;
  std::ostream* log = nullptr;  // progress lines, if set
};

/// Solved model for a reference; solved once per process and shared.
const boltzmann::PeelingModel& shared_model(const ModelRef& ref);

ExperimentResult run_experiment(const ExperimentConfig& config, const RunContext& ctx = {});

ExperimentResult exp_perimeter_finite(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_perimeter_infinite(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_fpp(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_height(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_joint_faces(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_ball_perimeters(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_lamperti_identity(const ExperimentConfig& config, const RunContext& ctx);
ExperimentResult exp_self_similarity(const ExperimentConfig& config, const RunContext& ctx);

}  // namespace peelkit::verify
