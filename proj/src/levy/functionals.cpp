#include "peelkit/levy/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace peelkit::levy {

namespace {

bool in_window(double size, double eps) {
  const double a = std::abs(size);
  return a >= eps && a <= 2.0 * eps;
}

}  // namespace

double qnd_estimator(const std::vector<double>& jump_times, const std::vector<double>& jump_sizes, double u,
                     double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("qnd window needs eps > 0");
  if (jump_times.size() != jump_sizes.size()) throw std::invalid_argument("jump times and sizes differ in length");
  long count = 0;
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    if (jump_times[i] <= u && in_window(jump_sizes[i], eps)) ++count;
  }
  return eps * static_cast<double>(count);
}

double qnd_estimator(const std::vector<XJump>& jumps, double u, double eps, double time_scale) {
  if (!(eps > 0.0)) throw std::invalid_argument("qnd window needs eps > 0");
  long count = 0;
  for (const XJump& j : jumps) {
    if (j.t <= time_scale * u && in_window(j.size, eps)) ++count;
  }
  return eps * static_cast<double>(count);
}

double qnd_estimator(const JumpPath& path, double u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("qnd window needs eps > 0");
  long count = 0;
  for (const Jump& j : path.jumps) {
    if (!j.surrogate && j.time <= u && in_window(j.size, eps)) ++count;
  }
  return eps * static_cast<double>(count);
}

double lamperti_distance(const StepPath& y, double d) {
  if (y.time.empty() || y.time.size() != y.value.size()) throw std::invalid_argument("malformed step path");
  if (y.time.front() != 0.0) throw std::invalid_argument("step path must start at time 0");
  if (d < 0.0) throw std::invalid_argument("distance horizon must be >= 0");
  double total = 0.0;
  for (std::size_t i = 0; i < y.time.size() && y.time[i] < d; ++i) {
    const double end = i + 1 < y.time.size() ? std::min(y.time[i + 1], d) : d;
    if (end <= y.time[i]) continue;
    if (!(y.value[i] > 0.0)) throw std::domain_error("path touches 0 before the distance horizon");
    total += (end - y.time[i]) / y.value[i];
  }
  return total;
}

double lamperti_distance(const LampertiResult& x, std::size_t index, double time_scale) {
  if (x.alpha != -1.0) throw std::invalid_argument("closed-form distance needs alpha = -1");
  if (index >= x.tau.size()) throw std::out_of_range("grid index out of range");
  const double tau = x.tau[index];
  if (!std::isfinite(tau)) throw std::domain_error("path died before the distance horizon");
  return tau / time_scale;
}

}  // namespace peelkit::levy
