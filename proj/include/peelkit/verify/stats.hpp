#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "peelkit/rng.hpp"

namespace peelkit::verify {

/// Sup-norm distance between the empirical CDF of `a` and the (optionally
/// weighted) empirical CDF of `b`. Empty `weights_b` means equal weights.
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<double>& weights_b = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval for the KS distance, resampling both sides.
Interval ks_bootstrap(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& weights_b,
                      int resamples, Rng& rng, double level = 0.95);

/// Kendall tau-b between two sequences.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

/// Weighted quantile: smallest value whose weighted CDF reaches q.
double weighted_quantile(const std::vector<double>& v, const std::vector<double>& w, double q);

inline constexpr std::array<double, 9> kQuantileLevels{0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99};

/// Values at kQuantileLevels, weighted when `w` is nonempty.
std::array<double, 9> quantile_row(const std::vector<double>& v, const std::vector<double>& w = {});

double mean(const std::vector<double>& v);
double standard_error(const std::vector<double>& v);

}  // namespace peelkit::verify
