#include "peelkit/verify/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace peelkit::verify {

namespace {

std::vector<std::size_t> order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  return idx;
}

}  // namespace

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& weights_b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS needs two nonempty samples");
  if (!weights_b.empty() && weights_b.size() != b.size()) throw std::invalid_argument("KS weights differ in length");
  std::vector<double> sa(a);
  std::sort(sa.begin(), sa.end());
  const std::vector<std::size_t> ob = order(b);
  double wtotal = 0.0;
  if (weights_b.empty()) {
    wtotal = static_cast<double>(b.size());
  } else {
    for (double w : weights_b) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("KS weights must be finite and >= 0");
      wtotal += w;
    }
  }
  if (!(wtotal > 0.0)) throw std::invalid_argument("KS weights are all zero");

  const double na = static_cast<double>(sa.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double fb = 0.0;
  double d = 0.0;
  while (i < sa.size() || j < ob.size()) {
    const double xa = i < sa.size() ? sa[i] : INFINITY;
    const double xb = j < ob.size() ? b[ob[j]] : INFINITY;
    const double x = std::min(xa, xb);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < ob.size() && b[ob[j]] == x) {
      fb += weights_b.empty() ? 1.0 : weights_b[ob[j]];
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - fb / wtotal));
    if (std::isinf(x)) break;
  }
  return std::min(d, 1.0);
}

Interval ks_bootstrap(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& weights_b,
                      int resamples, Rng& rng, double level) {
  if (resamples < 1) return {NAN, NAN};
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  std::vector<double> rw(weights_b.empty() ? 0 : b.size());
  const auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
  for (int r = 0; r < resamples; ++r) {
    for (double& x : ra) x = a[pick(a.size())];
    for (std::size_t k = 0; k < rb.size(); ++k) {
      const std::size_t m = pick(b.size());
      rb[k] = b[m];
      if (!rw.empty()) rw[k] = weights_b[m];
    }
    if (!rw.empty() && std::all_of(rw.begin(), rw.end(), [](double w) { return w == 0.0; })) continue;
    stats.push_back(ks_two_sample(ra, rb, rw));
  }
  if (stats.empty()) return {NAN, NAN};
  const double tail = 0.5 * (1.0 - level);
  return {quantile(stats, tail), quantile(stats, 1.0 - tail)};
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("Kendall tau needs equal lengths");
  long concordant = 0;
  long discordant = 0;
  long tie_x = 0;
  long tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((n0 + tie_x) * (n0 + tie_y));
  return denom > 0.0 ? static_cast<double>(concordant - discordant) / denom : 0.0;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double f = pos - static_cast<double>(lo);
  if (f == 0.0 || v[lo] == v[hi]) return v[lo];
  return v[lo] + f * (v[hi] - v[lo]);
}

double weighted_quantile(const std::vector<double>& v, const std::vector<double>& w, double q) {
  if (v.empty() || v.size() != w.size()) throw std::invalid_argument("weighted quantile needs matching samples");
  const std::vector<std::size_t> idx = order(v);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("weighted quantile with zero total weight");
  double acc = 0.0;
  for (std::size_t k : idx) {
    acc += w[k];
    if (acc >= q * total) return v[k];
  }
  return v[idx.back()];
}

std::array<double, 9> quantile_row(const std::vector<double>& v, const std::vector<double>& w) {
  std::array<double, 9> out{};
  if (v.empty()) {
    out.fill(NAN);
    return out;
  }
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < kQuantileLevels.size(); ++k) {
    out[k] = w.empty() ? quantile(sorted, kQuantileLevels[k]) : weighted_quantile(v, w, kQuantileLevels[k]);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return NAN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return NAN;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace peelkit::verify
