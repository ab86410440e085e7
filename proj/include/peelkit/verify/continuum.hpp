#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "peelkit/verify/parallel.hpp"

namespace peelkit::verify {

/// Named columns of equal length, one entry per continuum replicate.
struct ColumnSet {
  std::map<std::string, std::vector<double>> columns;

  const std::vector<double>& at(const std::string& name) const;
  std::vector<double>& operator[](const std::string& name) { return columns[name]; }
  std::size_t rows() const;
};

/// JSON round trip; doubles keep all digits and +inf is stored as null.
std::string encode_columns(const ColumnSet& set, const std::string& key);
ColumnSet decode_columns(const std::string& text, const std::string& expected_key);

/// Disk cache of continuum ensembles keyed by (process, params, seed).
/// An empty directory disables caching.
class ContinuumCache {
 public:
  explicit ContinuumCache(std::string dir = {}) : dir_(std::move(dir)) {}
  ColumnSet get_or_compute(const std::string& process, const std::string& params, std::uint64_t seed,
                           const std::function<ColumnSet()>& compute) const;
  static std::string key(const std::string& process, const std::string& params, std::uint64_t seed);

 private:
  std::string dir_;
};

struct EnsembleRun {
  std::size_t n = 0;
  std::uint64_t seed = 1;
  Execution exec = Execution::parallel;
  int threads = 0;
};

/// X^(-1) from x read at X-times `times`: columns value_i, tau_i (ξ-time,
/// +inf after death) and zeta.
ColumnSet lamperti_ensemble(double x, const std::vector<double>& times, double eps_cut, const EnsembleRun& run);

/// Υ↑ on [0, times.back()]: columns value_i at `times` and weight.
ColumnSet upsilon_ensemble(const std::vector<double>& times, double eps_cut, const EnsembleRun& run);

/// α = -1 growth-fragmentation from 1 over full lifetimes: the `ranks`
/// largest positive jumps (>= δ) over all cells with columns size_r,
/// ytime_r (global time / π) and distance_r (ancestral ξ-time / π); 0 when
/// fewer jumps exist.
ColumnSet gf_jump_ensemble(double delta, int ranks, double eps_cut, const EnsembleRun& run);

/// α = 0 growth-fragmentation from 1: the `ranks` largest cells at each time,
/// columns rank_r_i, 0 when fewer cells are alive.
ColumnSet gf_rank_ensemble(const std::vector<double>& times, double delta, int ranks, double eps_cut,
                           const EnsembleRun& run);

}  // namespace peelkit::verify
