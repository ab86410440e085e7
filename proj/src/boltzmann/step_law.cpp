#include "peelkit/boltzmann/step_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "peelkit/numeric.hpp"

namespace peelkit::boltzmann {

std::string PeelEvent::str() const {
  if (kind == Kind::C) return "C(" + std::to_string(param) + ")";
  return std::string("G(") + (side == Side::left ? "left" : "right") + "," + std::to_string(param) + ")";
}

PeelingModel::PeelingModel(PartitionTable table) : table_(std::move(table)) {
  const long end = table_.exact_end();
  const double c = table_.c();
  h_up_.assign(static_cast<std::size_t>(end) + 1, 0.0);
  for (long p = 1; p <= end; ++p) h_up_[p] = boltzmann::h_up(p);

  std::vector<double> w(static_cast<std::size_t>(end) + 1);
  for (long p = 0; p <= end; ++p) w[p] = table_.w(p);

  g_finite_.assign(static_cast<std::size_t>(end) + 1, 0.0);
  g_infinite_.assign(static_cast<std::size_t>(end) + 1, 0.0);
  for (long p = 1; p <= end; ++p) {
    double split = 0.0;
    for (long a = 0; a < p; ++a) split += w[a] * w[p - 1 - a];
    g_finite_[p] = split / (c * w[p]);
    double down = 0.0;
    for (long j = 0; j <= p - 2; ++j) down += w[j] * h_up_[p - 1 - j];
    g_infinite_[p] = 2.0 * down / (c * h_up_[p]);
  }
  long double total = 0.0L;
  for (long a = 0; a <= end; ++a) total += w[a];
  total += numeric::tail_sum([&](double x) { return table_.w_ansatz(x); }, end);
  swallow_limit_ = static_cast<double>(2.0L * total / c);
}

double PeelingModel::h_up(long p) const {
  if (p >= 1 && p < static_cast<long>(h_up_.size())) return h_up_[p];
  return boltzmann::h_up(p);
}

double PeelingModel::direct_swallow_mass(Mode mode, long p) const {
  const double c = table_.c();
  long double s = 0.0L;
  if (mode == Mode::finite) {
    for (long a = 0; a < p; ++a) s += static_cast<long double>(table_.w(a)) * table_.w(p - 1 - a);
    return static_cast<double>(s / (c * table_.w(p)));
  }
  for (long j = 0; j <= p - 2; ++j) s += static_cast<long double>(table_.w(j)) * h_up(p - 1 - j);
  return static_cast<double>(2.0L * s / (c * h_up(p)));
}

namespace {

constexpr double kFarRatio = 1.01;
constexpr double kFarSpan = 64.0;

}  // namespace

double PeelingModel::swallow_mass(Mode mode, long p) const {
  if (p < 1) throw std::invalid_argument("half-perimeter must be >= 1");
  if (p <= cached_end()) return mode == Mode::finite ? g_finite_[p] : g_infinite_[p];
  const double end = static_cast<double>(cached_end());
  // g(p) - g(∞) decays like a power of p here; linear interpolation in log p
  // on a 1% grid is accurate to ~1e-9, and past the grid the last local power
  // law is extended.
  FarTable& far = *far_;
  const int m = mode == Mode::finite ? 0 : 1;
  std::call_once(far.once[m], [&] {
    std::vector<double> log_p;
    std::vector<double> g;
    long last = 0;
    for (double x = end; x < kFarSpan * end * kFarRatio; x *= kFarRatio) {
      const long node = std::lround(x);
      if (node == last) continue;
      last = node;
      log_p.push_back(std::log(static_cast<double>(node)));
      g.push_back(direct_swallow_mass(mode, node));
    }
    const std::size_t n = g.size();
    const std::size_t back = std::min<std::size_t>(n - 1, 140);  // about a factor 4 in p
    const double d0 = g[n - 1 - back] - swallow_limit_;
    const double d1 = g[n - 1] - swallow_limit_;
    if (d0 != 0.0 && d1 / d0 > 0.0 && back > 0) {
      far.decay[m] = -std::log(d1 / d0) / (log_p[n - 1] - log_p[n - 1 - back]);
    }
    far.g[m] = std::move(g);
    far.log_p[m] = std::move(log_p);
  });
  const std::vector<double>& xs = far.log_p[m];
  const std::vector<double>& ys = far.g[m];
  const double x = std::log(static_cast<double>(p));
  const std::size_t hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  if (hi == 0) return ys.front();
  if (hi >= xs.size()) {
    return swallow_limit_ + (ys.back() - swallow_limit_) * std::exp(-far.decay[m] * (x - xs.back()));
  }
  const double f = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + f * (ys[hi] - ys[hi - 1]);
}

StepLaw::StepLaw(const PeelingModel& model, Mode mode, long p) : model_(&model), mode_(mode), p_(p) {
  if (p < 1) throw std::invalid_argument("transition law needs p >= 1");
  swallow_ = model.swallow_mass(mode, p);
  base_ = mode == Mode::finite ? model.table().w(p) : model.h_up(p);
}

StepLaw transition_law(const PeelingModel& model, Mode mode, long p) { return StepLaw(model, mode, p); }

double StepLaw::growth_weight(long k) const {
  const PartitionTable& t = model_->table();
  if (mode_ == Mode::finite) return t.nu(k - 1) * t.w(p_ + k - 1) / base_;
  return t.nu(k - 1) * model_->h_up(p_ + k - 1) / base_;
}

double StepLaw::prob(const PeelEvent& e) const {
  const PartitionTable& t = model_->table();
  if (e.kind == PeelEvent::Kind::C) return e.param >= 1 ? growth_weight(e.param) : 0.0;
  const long j = e.param;
  if (mode_ == Mode::finite) {
    const long rest = p_ - 1 - j;
    if (j < 0 || j > rest) return 0.0;
    if (j == rest && e.side == Side::right) return 0.0;
    return t.w(j) * t.w(rest) / (t.c() * base_);
  }
  if (j < 0 || j > p_ - 2) return 0.0;
  return 0.5 * t.nu(-j - 1) * model_->h_up(p_ - 1 - j) / base_;
}

double StepLaw::growth_tail(long k_max) const {
  const PartitionTable& t = model_->table();
  const WeightSequence& q = t.weights();
  const long support = q.support_end();
  const long explicit_end = std::min<long>(std::max(k_max, t.exact_end()), support);
  long double s = 0.0L;
  for (long k = k_max + 1; k <= explicit_end; ++k) s += growth_weight(k);
  if (support == WeightSequence::kUnbounded) {
    const double c = t.c();
    const double pd = static_cast<double>(p_);
    if (mode_ == Mode::finite) {
      s += numeric::tail_sum([&](double x) { return q.scaled(x, c) * t.w_ansatz(pd + x - 1.0) / base_; }, explicit_end);
    } else {
      s += numeric::tail_sum(
          [&](double x) { return q.scaled(x, c) * 2.0 * (pd + x - 1.0) * numeric::h_down_real(pd + x - 1.0) / base_; },
          explicit_end);
    }
  }
  return static_cast<double>(s);
}

long StepLaw::sample_growth_tail(Rng& rng, long k_from) const {
  // Rejection from a discretized Pareto proposal matched to the local decay.
  const double K = static_cast<double>(k_from) + 0.5;
  const double f0 = growth_weight(k_from + 1), f1 = growth_weight(4 * (k_from + 1));
  if (!(f0 > 0.0)) return k_from + 1;
  double s = (f1 > 0.0) ? std::log(f0 / f1) / std::log(4.0) : 6.0;
  s = std::clamp(s, 1.2, 6.0);
  auto proposal_mass = [&](long k) {
    const double a = static_cast<double>(k) - 0.5, b = static_cast<double>(k) + 0.5;
    return std::pow(K, s - 1.0) * (std::pow(a, 1.0 - s) - std::pow(b, 1.0 - s));
  };
  double bound = 0.0;
  for (double k = K + 0.5; k < 1e15 && k < 1e6 * K; k *= 2.0) {
    const long ki = static_cast<long>(k);
    bound = std::max(bound, growth_weight(ki) / proposal_mass(ki));
  }
  bound *= 1.2;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double x = K * std::pow(rng.uniform(), -1.0 / (s - 1.0));
    if (x > 9e15) continue;
    const long k = std::max(k_from + 1, std::lround(x));
    if (rng.uniform() * bound * proposal_mass(k) < growth_weight(k)) return k;
  }
  return k_from + 1;
}

PeelEvent StepLaw::sample(Rng& rng) const {
  const PartitionTable& t = model_->table();
  const double u = rng.uniform();
  if (u < swallow_) {
    double cum = 0.0;
    if (mode_ == Mode::finite) {
      const double scale = 1.0 / (t.c() * base_);
      const long half = (p_ - 1) / 2;
      for (long j = 0; j <= half; ++j) {
        const long rest = p_ - 1 - j;
        const double one_side = t.w(j) * t.w(rest) * scale;
        if (j == rest) {
          cum += one_side;
          if (u < cum) return PeelEvent::G(Side::left, j);
        } else {
          cum += 2.0 * one_side;
          if (u < cum) return PeelEvent::G(u < cum - one_side ? Side::left : Side::right, j);
        }
      }
      return PeelEvent::G(Side::left, half);
    }
    for (long j = 0; j <= p_ - 2; ++j) {
      const double both = t.nu(-j - 1) * model_->h_up(p_ - 1 - j) / base_;
      cum += both;
      if (u < cum) return PeelEvent::G(u < cum - 0.5 * both ? Side::left : Side::right, j);
    }
    return PeelEvent::G(Side::left, p_ - 2);
  }

  const double target = u - swallow_;
  const long support = t.weights().support_end();
  const long scan_end = std::min(support, mode_ == Mode::finite ? 64 * p_ + 64 : 4096 * p_ + 4096);
  double cum = 0.0;
  for (long k = 1; k <= scan_end; ++k) {
    cum += growth_weight(k);
    if (target < cum) return PeelEvent::C(k);
  }
  if (scan_end >= support) return PeelEvent::C(support);
  return PeelEvent::C(sample_growth_tail(rng, scan_end));
}

}  // namespace peelkit::boltzmann
