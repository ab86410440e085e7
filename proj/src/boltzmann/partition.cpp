#include "peelkit/boltzmann/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "peelkit/numeric.hpp"

namespace peelkit::boltzmann {

namespace {

constexpr double kGapTolerance = 1e-10;

bool unbounded(const WeightSequence& q) { return q.support_end() == WeightSequence::kUnbounded; }

/// Last index k summed explicitly in series over ν(k) = q_{k+1} c^k.
long explicit_end(const WeightSequence& q, long explicit_terms) {
  if (unbounded(q)) return std::max(explicit_terms, q.table_end());
  return q.support_end() - 1;
}

/// Σ_{k>=0} ν_c(k) g(k) with an integral remainder for unbounded support.
template <class G>
double nu_series(const WeightSequence& q, double c, long explicit_terms, G&& g) {
  const long last = explicit_end(q, explicit_terms);
  long double s = 0.0L;
  for (long k = 0; k <= last; ++k) s += static_cast<long double>(q.scaled(k + 1.0, c)) * g(static_cast<double>(k));
  if (unbounded(q)) {
    s += numeric::tail_sum([&](double x) { return q.scaled(x + 1.0, c) * g(x); }, last);
  }
  return static_cast<double>(s);
}

double admissibility_gap(const WeightSequence& q, double c, long explicit_terms) {
  const double f = 2.0 * nu_series(q, c, explicit_terms, [](double k) { return numeric::h_down_real(k + 1.0); });
  return f - 1.0 + 4.0 / c;
}

double criticality(const WeightSequence& q, double c, long explicit_terms) {
  const double s = nu_series(q, c, explicit_terms, [](double k) { return 2.0 * k * numeric::h_down_real(k + 1.0); });
  return 0.25 * c * s;
}

/// Least-squares coefficients of y on the given basis columns.
Eigen::VectorXd fit(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y) {
  return basis.colPivHouseholderQr().solve(y);
}

}  // namespace

AdmissibilityRoot solve_admissibility(const WeightSequence& q, const SolverOptions& options) {
  const long K = options.explicit_terms;
  auto g = [&](double c) { return admissibility_gap(q, c, K); };
  AdmissibilityRoot out;

  auto bisect = [&](double lo, double hi) {
    for (int it = 0; it < options.max_iter && hi - lo > 1e-15 * hi; ++it, ++out.iterations) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    if (hi - lo > 1e-12 * hi) throw SolverError("admissibility root did not converge within max_iter");
    return 0.5 * (lo + hi);
  };
  auto golden = [&](double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    for (int it = 0; it < options.max_iter && hi - lo > 1e-13 * hi; ++it, ++out.iterations) {
      if (g1 <= g2) {
        hi = x2, x2 = x1, g2 = g1;
        x1 = hi - r * (hi - lo), g1 = g(x1);
      } else {
        lo = x1, x1 = x2, g1 = g2;
        x2 = lo + r * (hi - lo), g2 = g(x2);
      }
    }
    return 0.5 * (lo + hi);
  };

  const double radius = q.growth_radius();
  double lo = 0.0, hi = 0.0, argmin = 0.0;
  if (std::isfinite(radius)) {
    hi = q.summable_at_radius() ? radius : radius * (1.0 - 1e-9);
    lo = 1e-6 * hi;
    argmin = golden(lo, hi);
  } else {
    double c1 = 1.0, g1 = g(c1);
    if (g1 < 0.0) {
      out.c = bisect(1e-6, c1);
      out.gap = g(out.c);
      return out;
    }
    bool bracketed = false;
    for (int it = 0; it < options.max_iter; ++it) {
      const double c2 = 2.0 * c1, g2 = g(c2);
      if (g2 < 0.0) {
        out.c = bisect(c1, c2);
        out.gap = g(out.c);
        return out;
      }
      if (g2 >= g1) {
        lo = 0.5 * c1, hi = c2;
        bracketed = true;
        break;
      }
      c1 = c2, g1 = g2;
    }
    if (!bracketed) throw SolverError("could not bracket the admissibility equation");
    argmin = golden(lo, hi);
  }

  const double gmin = g(argmin);
  if (gmin < -kGapTolerance) {
    out.c = bisect(lo, argmin);
  } else if (std::isfinite(radius) && std::abs(g(hi)) <= kGapTolerance && hi - argmin < 1e-6 * hi) {
    out.c = hi;
    out.at_radius = true;
  } else if (gmin <= kGapTolerance) {
    out.c = argmin;
  } else {
    throw SolverError("weight sequence is not admissible: min of the admissibility gap is " + std::to_string(gmin));
  }
  out.gap = g(out.c);
  return out;
}

double PartitionTable::w_ansatz(double ell) const {
  return std::exp(log_amp_ + exponent_ * std::log(ell) + a1_ / ell + a2_ / (ell * ell));
}

double PartitionTable::w(long ell) const {
  if (ell < 0) throw std::out_of_range("negative half-perimeter");
  if (ell <= exact_end()) return w_[ell];
  return w_ansatz(static_cast<double>(ell));
}

double PartitionTable::log_W(long ell) const { return std::log(w(ell)) + static_cast<double>(ell) * std::log(c_); }

double PartitionTable::W(long ell) const { return std::exp(log_W(ell)); }

double PartitionTable::nu(long step) const {
  if (step >= 0) {
    if (step < static_cast<long>(nu_pos_.size())) return nu_pos_[step];
    return q_.scaled(step + 1.0, c_);
  }
  return 2.0 * w(-step - 1) / c_;
}

double tutte_residual(const PartitionTable& table, long p_max) {
  const WeightSequence& q = table.weights();
  const double c = table.c();
  const long end = table.exact_end();
  double worst = 0.0;
  for (long p = 1; p <= p_max; ++p) {
    long double growth = 0.0L;
    for (long k = 0; k <= end - p; ++k) growth += static_cast<long double>(table.nu(k)) * table.w(p + k);
    if (unbounded(q)) {
      growth += numeric::tail_sum([&](double x) { return q.scaled(x + 1.0, c) * table.w_ansatz(p + x); }, end - p);
    } else {
      for (long k = end - p + 1; k <= q.support_end() - 1; ++k) growth += table.nu(k) * table.w(p + k);
    }
    long double split = 0.0L;
    for (long j = 0; j < p; ++j) split += static_cast<long double>(table.w(j)) * table.w(p - 1 - j);
    const long double lhs = table.w(p);
    const double r = static_cast<double>(std::abs(lhs - growth - split / c) / lhs);
    worst = std::max(worst, r);
  }
  return worst;
}

PartitionTable solve_partition_function(const WeightSequence& q, long L_max, const SolverOptions& options) {
  if (L_max < 32) throw std::invalid_argument("L_max must be at least 32");
  if (options.extension_factor < 1) throw std::invalid_argument("extension_factor must be >= 1");

  const AdmissibilityRoot root = solve_admissibility(q, options);
  const double c = root.c;
  const long L_ext = options.extension_factor * L_max;
  const long last = explicit_end(q, options.explicit_terms);

  PartitionTable table(q);
  table.c_ = c;
  table.L_max_ = L_max;
  table.nu_pos_.resize(static_cast<std::size_t>(L_ext) + 1);
  for (long k = 0; k <= L_ext; ++k) table.nu_pos_[k] = q.scaled(k + 1.0, c);

  // h_down is ν-harmonic on the positive integers, so the defect of its
  // positive-step part is R_m = Σ_j ν(-j) h_down(m-j). ν(-l) follows by
  // inverting the convolution with h_down, whose generating function is (1-x)^{-1/2}.
  const std::vector<long double> hd = numeric::h_down_table(L_ext + 1 + last);
  std::vector<long double> nu_head(static_cast<std::size_t>(last) + 1);
  for (long k = 0; k <= last; ++k) nu_head[k] = q.scaled(k + 1.0, c);
  std::vector<long double> defect(static_cast<std::size_t>(L_ext) + 2, 0.0L);
  for (long m = 1; m <= L_ext + 1; ++m) {
    long double s = 0.0L;
    for (long k = 0; k <= last; ++k) s += nu_head[k] * hd[m + k];
    if (unbounded(q)) {
      const double md = static_cast<double>(m);
      s += numeric::tail_sum([&](double x) { return q.scaled(x + 1.0, c) * numeric::h_down_real(md + x); }, last);
    }
    defect[m] = hd[m] - s;
  }
  std::vector<long double> sqrt_coef(static_cast<std::size_t>(L_ext) + 2);
  sqrt_coef[0] = 1.0L;
  for (long n = 0; n <= L_ext; ++n) sqrt_coef[n + 1] = sqrt_coef[n] * (n - 0.5L) / (n + 1.0L);

  table.w_.resize(static_cast<std::size_t>(L_ext) + 1);
  for (long ell = 0; ell <= L_ext; ++ell) {
    const long n = ell + 1;
    long double s = 0.0L;
    for (long m = 1; m <= n; ++m) s += sqrt_coef[n - m] * defect[m];
    table.w_[ell] = static_cast<double>(0.5L * c * s);
  }
  table.diag_.w0_consistency = std::abs(table.w_[0] - 1.0);
  table.w_[0] = 1.0;
  for (long ell = 0; ell <= L_ext; ++ell) {
    if (!(table.w_[ell] > 0.0)) {
      throw SolverError("partition values lost positivity at l = " + std::to_string(ell));
    }
  }

  // Free-exponent fit over a wide window, constrained fit over the last quarter.
  {
    const long lo = L_max / 4, n = L_max - lo + 1;
    Eigen::MatrixXd basis(n, 4);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      const double ell = static_cast<double>(lo + i);
      basis.row(i) << 1.0, std::log(ell), 1.0 / ell, 1.0 / (ell * ell);
      y(i) = std::log(table.w_[lo + i]);
    }
    const Eigen::VectorXd b = fit(basis, y);
    table.diag_.fitted_exponent = b(1);
    table.diag_.type2 = std::abs(b(1) + 2.0) < 0.05;
    if (!table.diag_.type2) {
      table.log_amp_ = b(0);
      table.exponent_ = b(1);
      table.a1_ = b(2);
      table.a2_ = b(3);
    }
  }
  {
    const long lo = (3 * L_max) / 4, n = L_max - lo + 1;
    Eigen::MatrixXd basis(n, 3);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      const double ell = static_cast<double>(lo + i);
      basis.row(i) << 1.0, 1.0 / ell, 1.0 / (ell * ell);
      y(i) = std::log(2.0 * table.w_[lo + i] * ell * ell / c);
    }
    const Eigen::VectorXd a = fit(basis, y);
    table.p_ = std::exp(a(0));
    if (table.diag_.type2) {
      table.log_amp_ = a(0) + std::log(0.5 * c);
      table.exponent_ = -2.0;
      table.a1_ = a(1);
      table.a2_ = a(2);
    }
    double dev = 0.0;
    for (long ell = lo; ell <= L_max; ++ell) {
      dev = std::max(dev, std::abs(table.w_ansatz(static_cast<double>(ell)) / table.w_[ell] - 1.0));
    }
    table.diag_.tail_fit_deviation = dev;
  }

  table.diag_.admissibility_gap = root.gap;
  table.diag_.at_growth_radius = root.at_radius;
  table.diag_.c_iterations = root.iterations;
  table.diag_.criticality = criticality(q, c, options.explicit_terms);

  table.residual_ = tutte_residual(table, L_max - L_max / 4);
  if (!(table.residual_ <= options.tol)) {
    throw SolverError("Tutte residual " + std::to_string(table.residual_) + " exceeds tolerance");
  }
  return table;
}

double h_up(long ell) {
  if (ell <= 0) throw std::invalid_argument("h_up needs l >= 1");
  return 2.0 * static_cast<double>(ell) * numeric::h_down_real(static_cast<double>(ell));
}

double f_up(const PartitionTable& table, long ell) { return h_up(ell) / table.w(ell); }

}  // namespace peelkit::boltzmann
