#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace peelkit::numeric {

/// 4^{-n} C(2n, n) for n = 0..n_max.
std::vector<long double> h_down_table(long n_max);

/// Real extension Γ(x+1/2) / (√π Γ(x+1)) of 4^{-n} C(2n, n).
double h_down_real(double x);

/// ∫_a^∞ f(x) dx by double-exponential quadrature.
template <class F>
double integrate_to_infinity(F&& f, double a, double tol = 1e-14) {
  if (f(a) == 0.0 && f(2.0 * a + 1.0) == 0.0) return 0.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(), tol);
}

/// ∫_a^∞ f(x) dx for f decaying at least like x^{-3/2}, via x = a/s^2 and
/// fixed-order Gauss–Legendre on s in (0, 1]. Much cheaper than
/// integrate_to_infinity for the algebraic tails met in series remainders.
template <class F>
double integrate_algebraic_tail(F&& f, double a) {
  static const boost::math::quadrature::gauss<double, 30> rule;
  return rule.integrate(
      [&](double s) {
        if (s <= 0.0) return 0.0;
        const double x = a / (s * s);
        return f(x) * 2.0 * a / (s * s * s);
      },
      0.0, 1.0);
}

/// Σ_{k>K} f(k) for a smooth, eventually monotone f: midpoint integral plus the
/// first Euler–Maclaurin correction.
template <class F>
double tail_sum(F&& f, long K) {
  const double a = static_cast<double>(K) + 0.5;
  const double h = 0.25;
  const double slope = (f(a + h) - f(a - h)) / (2.0 * h);
  return integrate_algebraic_tail(f, a) - slope / 24.0;
}

}  // namespace peelkit::numeric
