#include "peelkit/levy/jump_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "peelkit/levy/measure.hpp"

namespace peelkit::levy {

void check_eps_cut(double eps_cut) {
  if (!(eps_cut > 0.0) || eps_cut > 0.1) throw std::invalid_argument("eps_cut must lie in (0, 0.1]");
}

double JumpPath::value(double t) const {
  double v = start + slope() * t;
  for (const Jump& j : jumps) {
    if (j.time > t) break;
    v += j.size;
  }
  return v;
}

double JumpPath::left_limit(double t) const {
  double v = start + slope() * t;
  for (const Jump& j : jumps) {
    if (j.time >= t) break;
    v += j.size;
  }
  return v;
}

double JumpPath::infimum() const {
  double acc = start;
  double best = start;
  double prev = 0.0;
  for (const Jump& j : jumps) {
    const double before = acc + slope() * (j.time - prev);
    acc = before + j.size;
    best = std::min({best, before, acc});
    prev = j.time;
  }
  best = std::min(best, acc + slope() * (horizon - prev));
  return best;
}

JumpPath sample_xi(double horizon, double eps_cut, Rng& rng, bool gaussian) {
  check_eps_cut(eps_cut);
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  const XiJumpSource source(eps_cut);
  JumpPath path;
  path.horizon = horizon;
  path.drift = kXiDrift;
  path.compensation = source.drift() - kXiDrift;
  path.eps_cut = eps_cut;
  const double sigma = std::sqrt(source.small_variance());
  double t = 0.0;
  double last = 0.0;
  for (;;) {
    t += source.next_wait(rng);
    const double end = std::min(t, horizon);
    if (gaussian && end > last) {
      path.jumps.push_back({0.5 * (last + end), sigma * std::sqrt(end - last) * rng.normal(), true});
      last = end;
    }
    if (t > horizon) break;
    path.jumps.push_back({t, source.next_size(rng), false});
  }
  return path;
}

JumpPath sample_cauchy(double start, double horizon, double eps_cut, Rng& rng, bool half) {
  check_eps_cut(eps_cut);
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  const double c = half ? 0.5 : 1.0;
  const double rate = 2.0 * c / eps_cut;
  JumpPath path;
  path.start = start;
  path.horizon = horizon;
  path.eps_cut = eps_cut;
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    const double size = eps_cut / rng.uniform();
    path.jumps.push_back({t, rng.coin() ? size : -size, false});
  }
  return path;
}

}  // namespace peelkit::levy
