#pragma once

#include <stdexcept>
#include <vector>

#include "peelkit/boltzmann/weights.hpp"

namespace peelkit::boltzmann {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 200;
  /// The exact table is built up to extension_factor * L_max; the tail ansatz
  /// takes over beyond that.
  long extension_factor = 8;
  /// Terms summed explicitly before a series remainder is replaced by an integral.
  long explicit_terms = 2000;
};

struct Diagnostics {
  double admissibility_gap = 0.0;  // f(c/4) - 1 + 4/c at the chosen c
  double criticality = 0.0;        // r^2 f'(r) at r = c/4; equals 1 at criticality
  bool at_growth_radius = false;   // c_q sits on the radius of convergence (non-generic)
  double fitted_exponent = 0.0;    // free-exponent fit of log w over the tail window
  bool type2 = false;              // exponent consistent with -2
  double w0_consistency = 0.0;     // |w_0 - 1| produced by the construction
  double tail_fit_deviation = 0.0; // max relative misfit of the ansatz on the tail window
  long c_iterations = 0;
};

/// Solved partition values of a Boltzmann map model.
///
/// Values are stored in the normalized form w_l = W^(l) c_q^{-l}, which stays
/// representable for every l; W() overflows to +inf past l ~ 300 for c_q = 3π.
class PartitionTable {
 public:
  double c() const { return c_; }
  double p() const { return p_; }
  long L_max() const { return L_max_; }
  long exact_end() const { return static_cast<long>(w_.size()) - 1; }
  double residual() const { return residual_; }
  const WeightSequence& weights() const { return q_; }
  const Diagnostics& diagnostics() const { return diag_; }

  /// W^(l) c_q^{-l}; tail ansatz past exact_end().
  double w(long ell) const;
  double W(long ell) const;
  double log_W(long ell) const;

  /// Ansatz value of w_l from the fitted tail.
  double w_ansatz(double ell) const;

  /// Step law of the ν-walk: ν(k) = q_{k+1} c^k for k >= 0 and
  /// ν(-k-1) = 2 W^(k) c^{-k-1} for k >= 0.
  double nu(long step) const;

  /// Tail-fit coefficients of log(2 w_l l^2 / c) = log p + a1/l + a2/l^2.
  double tail_a1() const { return a1_; }
  double tail_a2() const { return a2_; }

 private:
  friend PartitionTable solve_partition_function(const WeightSequence&, long, const SolverOptions&);

  explicit PartitionTable(WeightSequence q) : q_(std::move(q)) {}

  WeightSequence q_;
  double c_ = 0.0;
  double p_ = 0.0;
  long L_max_ = 0;
  double residual_ = 0.0;
  double a1_ = 0.0;
  double a2_ = 0.0;
  double log_amp_ = 0.0;
  double exponent_ = -2.0;
  std::vector<double> w_;
  std::vector<double> nu_pos_;  // ν(k), k = 0..exact_end()
  Diagnostics diag_;
};

PartitionTable solve_partition_function(const WeightSequence& q, long L_max, const SolverOptions& options = {});

inline PartitionTable solve_partition_function(const WeightSequence& q, long L_max, double tol, int max_iter) {
  SolverOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return solve_partition_function(q, L_max, options);
}

/// c_q alone: root (or tangency point) of the admissibility equation.
struct AdmissibilityRoot {
  double c = 0.0;
  double gap = 0.0;
  bool at_radius = false;
  long iterations = 0;
};
AdmissibilityRoot solve_admissibility(const WeightSequence& q, const SolverOptions& options = {});

/// Max relative Tutte-identity violation for 1 <= p <= p_max.
double tutte_residual(const PartitionTable& table, long p_max);

/// 2l 4^{-l} C(2l, l).
double h_up(long ell);

/// h_up(l) / (W^(l) c_q^{-l}).
double f_up(const PartitionTable& table, long ell);

/// Result of the independent Newton scheme used to cross-check (c_q, p_q).
struct NewtonSolution {
  double c = 0.0;
  double p = 0.0;
  std::vector<double> w;  // w_0..w_L
  int outer_iterations = 0;
  int newton_iterations = 0;
  double tail_slope = 0.0;
};

/// Solves the Tutte identity closed by the tail ansatz with Newton's method and
/// adjusts c until the fitted exponential slope of the tail vanishes.
NewtonSolution solve_partition_function_newton(const WeightSequence& q, long L_max, double tol = 1e-12,
                                               int max_iter = 60);

}  // namespace peelkit::boltzmann
