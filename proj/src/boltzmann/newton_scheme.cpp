#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/numeric.hpp"

namespace peelkit::boltzmann {

namespace {

/// Tail beyond L: w_l = exp(a0 + a1 / l) / l^2, with (a0, a1) the least-squares
/// fit of log(w_l l^2) over the last quarter. The fit is linear in log w, so
/// its derivative enters the Jacobian exactly.
struct TailFit {
  long lo = 0;
  double a0 = 0.0;
  double a1 = 0.0;
  Eigen::MatrixXd projector;  // 2 x window rows: d(a0, a1) / d(log w_m)
  double operator()(double ell) const { return std::exp(a0 + a1 / ell) / (ell * ell); }
};

TailFit fit_tail(const std::vector<double>& w, long L) {
  TailFit t;
  t.lo = (3 * L) / 4;
  const long n = L - t.lo + 1;
  Eigen::MatrixXd basis(n, 2);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    const double ell = static_cast<double>(t.lo + i);
    basis.row(i) << 1.0, 1.0 / ell;
    y(i) = std::log(w[t.lo + i] * ell * ell);
  }
  t.projector = (basis.transpose() * basis).inverse() * basis.transpose();
  const Eigen::Vector2d a = t.projector * y;
  t.a0 = a(0);
  t.a1 = a(1);
  return t;
}

double fitted_slope(const std::vector<double>& w, long L) {
  const long lo = (3 * L) / 4, n = L - lo + 1;
  Eigen::MatrixXd basis(n, 3);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    const double ell = static_cast<double>(lo + i);
    basis.row(i) << 1.0, ell, 1.0 / ell;
    y(i) = std::log(w[lo + i] * ell * ell);
  }
  return basis.colPivHouseholderQr().solve(y)(1);
}

class ClosedSystem {
 public:
  ClosedSystem(const WeightSequence& q, long L, double c) : q_(q), L_(L), c_(c), far_(16 * L) {
    nu_.resize(static_cast<std::size_t>(far_) + 1);
    for (long k = 0; k <= far_; ++k) nu_[k] = q.scaled(k + 1.0, c);
  }

  /// Newton iterations on w_1..w_L; returns the number of iterations used.
  int solve(std::vector<double>& w, double tol, int max_iter) {
    const long L = L_;
    Eigen::MatrixXd J(L, L);
    Eigen::VectorXd F(L);
    for (int it = 1; it <= max_iter; ++it) {
      const TailFit fit = fit_tail(w, L);
      std::vector<double> beyond(static_cast<std::size_t>(L + far_) + 1, 0.0);
      for (long n = L + 1; n <= L + far_; ++n) beyond[n] = fit(static_cast<double>(n));
      // tail[p] = Σ_{k > L-p} ν(k) w_{p+k}; tail_a1[p] is its derivative in a1.
      std::vector<double> tail(static_cast<std::size_t>(L) + 1, 0.0), tail_a1(tail.size(), 0.0);
      for (long p = 1; p <= L; ++p) {
        long double t0 = 0.0L, t1 = 0.0L;
        for (long k = L - p + 1; k <= far_; ++k) {
          t0 += nu_[k] * beyond[p + k];
          t1 += nu_[k] * beyond[p + k] / static_cast<double>(p + k);
        }
        if (q_.support_end() == WeightSequence::kUnbounded) {
          t0 += numeric::tail_sum([&](double x) { return q_.scaled(x + 1.0, c_) * fit(p + x); }, far_);
          t1 += numeric::tail_sum([&](double x) { return q_.scaled(x + 1.0, c_) * fit(p + x) / (p + x); }, far_);
        }
        tail[p] = static_cast<double>(t0);
        tail_a1[p] = static_cast<double>(t1);
        long double growth = tail[p];
        for (long k = 0; k <= L - p; ++k) growth += static_cast<long double>(nu_[k]) * w[p + k];
        long double split = 0.0L;
        for (long j = 0; j < p; ++j) split += static_cast<long double>(w[j]) * w[p - 1 - j];
        F(p - 1) = static_cast<double>(w[p] - growth - split / c_);
      }
      J.setZero();
      for (long p = 1; p <= L; ++p) {
        J(p - 1, p - 1) += 1.0;
        for (long m = fit.lo; m <= L; ++m) {
          const long i = m - fit.lo;
          J(p - 1, m - 1) -= (tail[p] * fit.projector(0, i) + tail_a1[p] * fit.projector(1, i)) / w[m];
        }
        for (long r = p; r <= L; ++r) J(p - 1, r - 1) -= nu_[r - p];
        for (long r = 1; r <= p - 1; ++r) J(p - 1, r - 1) -= 2.0 * w[p - 1 - r] / c_;
      }
      const Eigen::VectorXd delta = J.partialPivLu().solve(-F);
      double step = 1.0;
      for (long p = 1; p <= L; ++p) {
        while (w[p] + step * delta(p - 1) <= 0.0) step *= 0.5;
      }
      double change = 0.0;
      for (long p = 1; p <= L; ++p) {
        w[p] += step * delta(p - 1);
        change = std::max(change, std::abs(step * delta(p - 1)) / w[p]);
      }
      if (change < tol) return it;
    }
    throw SolverError("Newton scheme did not converge at c = " + std::to_string(c_));
  }

 private:
  const WeightSequence& q_;
  long L_;
  double c_;
  long far_;
  std::vector<double> nu_;
};

}  // namespace

NewtonSolution solve_partition_function_newton(const WeightSequence& q, long L_max, double tol, int max_iter) {
  if (L_max < 32) throw std::invalid_argument("L_max must be at least 32");
  const double radius = q.growth_radius();
  if (!std::isfinite(radius) || !q.summable_at_radius()) {
    throw SolverError("Newton scheme needs a weight sequence summable at its growth radius");
  }

  NewtonSolution out;
  std::vector<double> w(static_cast<std::size_t>(L_max) + 1);
  w[0] = 1.0;
  for (long ell = 1; ell <= L_max; ++ell) w[ell] = 0.8 / ((ell + 1.0) * (ell + 1.0));

  auto slope_at = [&](double c, std::vector<double>& state) {
    ClosedSystem system(q, L_max, c);
    out.newton_iterations += system.solve(state, tol, max_iter);
    ++out.outer_iterations;
    return fitted_slope(state, L_max);
  };

  double c_hi = radius;
  std::vector<double> w_hi = w;
  double s_hi = slope_at(c_hi, w_hi);
  double c = c_hi;
  constexpr double kFlatSlope = 1e-6;
  if (s_hi > kFlatSlope) {
    double c_lo = radius * 0.99;
    std::vector<double> w_lo = w_hi;
    double s_lo = slope_at(c_lo, w_lo);
    for (int it = 0; s_lo > 0.0; ++it) {
      if (it > 20) throw SolverError("Newton scheme could not bracket the tail slope");
      c_lo = radius - 2.0 * (radius - c_lo);
      s_lo = slope_at(c_lo, w_lo);
    }
    int side = 0;
    for (int it = 0; it < max_iter && c_hi - c_lo > 1e-12 * c_hi; ++it) {
      c = (c_lo * s_hi - c_hi * s_lo) / (s_hi - s_lo);
      std::vector<double> w_mid = s_hi < -s_lo ? w_hi : w_lo;
      const double s_mid = slope_at(c, w_mid);
      if (s_mid > 0.0) {
        c_hi = c, s_hi = s_mid, w_hi = w_mid;
        if (side == 1) s_lo *= 0.5;
        side = 1;
      } else {
        c_lo = c, s_lo = s_mid, w_lo = w_mid;
        if (side == -1) s_hi *= 0.5;
        side = -1;
      }
      if (std::abs(s_mid) < 1e-12) break;
    }
    const bool take_hi = std::abs(s_hi) < std::abs(s_lo);
    c = take_hi ? c_hi : c_lo;
    w = take_hi ? w_hi : w_lo;
    out.tail_slope = take_hi ? s_hi : s_lo;
  } else {
    w = w_hi;
    out.tail_slope = s_hi;
  }

  out.c = c;
  const long lo = (3 * L_max) / 4, n = L_max - lo + 1;
  Eigen::MatrixXd basis(n, 3);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    const double ell = static_cast<double>(lo + i);
    basis.row(i) << 1.0, 1.0 / ell, 1.0 / (ell * ell);
    y(i) = std::log(2.0 * w[lo + i] * ell * ell / c);
  }
  out.p = std::exp(basis.colPivHouseholderQr().solve(y)(0));
  out.w = std::move(w);
  return out;
}

}  // namespace peelkit::boltzmann
