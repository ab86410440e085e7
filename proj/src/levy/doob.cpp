#include "peelkit/levy/doob.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace peelkit::levy {

double WeightedEnsemble::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double WeightedEnsemble::mean_weight() const { return weights.empty() ? 0.0 : total_weight() / weights.size(); }

double WeightedEnsemble::ess() const {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

std::vector<double> WeightedEnsemble::normalized() const {
  const double total = total_weight();
  if (!(total > 0.0)) throw std::runtime_error("ensemble has zero total weight");
  std::vector<double> out(weights);
  for (double& w : out) w /= total;
  return out;
}

WeightedEnsemble sample_upsilon_up(double horizon, std::size_t n, Rng& rng, const UpsilonOptions& options) {
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  double eps = options.eps_cut;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt, eps *= 0.5) {
    WeightedEnsemble ens;
    ens.eps_cut = eps;
    ens.retries = attempt;
    ens.first.reserve(n);
    ens.weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      JumpPath p = sample_cauchy(1.0, horizon, eps, rng, false);
      ens.weights.push_back(p.infimum() > 0.0 ? std::sqrt(p.terminal()) : 0.0);
      ens.first.push_back(std::move(p));
    }
    if (ens.total_weight() > 0.0) return ens;
  }
  throw std::runtime_error("upsilon ensemble: all weights zero after refinement retries");
}

WeightedEnsemble doob_pair_ensemble(double x, double y, double t, std::size_t n, Rng& rng, double eps_cut) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("Doob pair needs x, y > 0");
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  WeightedEnsemble ens;
  ens.eps_cut = eps_cut;
  ens.first.reserve(n);
  ens.second.reserve(n);
  ens.weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    JumpPath l = sample_cauchy(x, t, eps_cut, rng, true);
    JumpPath r = sample_cauchy(y, t, eps_cut, rng, true);
    const bool positive = l.infimum() > 0.0 && r.infimum() > 0.0;
    const double s = l.terminal() + r.terminal();
    ens.weights.push_back(positive ? std::pow((x + y) / s, 2) : 0.0);
    ens.first.push_back(std::move(l));
    ens.second.push_back(std::move(r));
  }
  return ens;
}

}  // namespace peelkit::levy
