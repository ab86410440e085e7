#pragma once

#include <vector>

#include "peelkit/levy/jump_path.hpp"
#include "peelkit/levy/lamperti.hpp"

namespace peelkit::levy {

/// ε · #{s <= u : |Δ(s)| ∈ [ε, 2ε]}.
double qnd_estimator(const std::vector<double>& jump_times, const std::vector<double>& jump_sizes, double u, double eps);

/// Same count on the recorded jumps of X seen through Y(s) = X(time_scale · s).
double qnd_estimator(const std::vector<XJump>& jumps, double u, double eps, double time_scale = 1.0);

/// Same count on a jump path; Gaussian surrogate increments are not jumps.
double qnd_estimator(const JumpPath& path, double u, double eps);

/// Right-continuous step function: value[i] on [time[i], time[i+1]), the last
/// value extending to +∞. time[0] must be 0.
struct StepPath {
  std::vector<double> time;
  std::vector<double> value;
};

/// ∫_0^d dt / Y(t) on a step path. Throws if Y <= 0 somewhere on [0, d).
double lamperti_distance(const StepPath& y, double d);

/// ∫_0^d dt / Y(t) for Y(t) = X(time_scale · t) with X the α = -1 transform:
/// equals τ(time_scale · d) / time_scale, read off at grid point `index`
/// (grid time time_scale · d). Throws if Y has died before d.
double lamperti_distance(const LampertiResult& x, std::size_t index, double time_scale);

}  // namespace peelkit::levy
