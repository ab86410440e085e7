#include "peelkit/levy/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace peelkit::levy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;

// x-space tail masses, before the 1/π factor. With z = x - 1 > 0,
// G(z) = ∫_{1+z}^∞ dx / (x(x-1))^2 = 1/(1+z) + 1/z - 2 log(1 + 1/z).
double right_tail(double z) {
  const double x = 1.0 + z;
  if (x > 64.0) {
    // Σ_{n>=3} (1 - 2/n) x^{-n}
    const double r = 1.0 / x;
    double term = r * r * r;
    double sum = 0.0;
    for (int n = 3; n < 40; ++n) {
      sum += (1.0 - 2.0 / n) * term;
      term *= r;
    }
    return sum;
  }
  return 1.0 / x + 1.0 / z - 2.0 * std::log1p(1.0 / z);
}

// With v = 1 - x in (0, 1/2], F(v) = ∫_{1/2}^{1-v} dx / (x(1-x))^2
// = 1/v - 1/(1-v) + 2 log((1-v)/v).
double left_tail(double v) { return 1.0 / v - 1.0 / (1.0 - v) + 2.0 * std::log((1.0 - v) / v); }

// Solves tail(e^s) = target for s = log z by safeguarded Newton. `tail` is
// decreasing in z; its derivative in z is -1/(x(x-1))^2 on both sides.
template <class Tail, class Deriv>
double invert_tail(Tail tail, Deriv deriv, double target, double s_lo, double s_hi, double s0) {
  double s = s0;
  for (int it = 0; it < 100; ++it) {
    const double z = std::exp(s);
    const double f = tail(z) - target;
    if (f > 0.0) {
      s_lo = s;
    } else {
      s_hi = s;
    }
    const double df = deriv(z) * z;
    double next = s - f / df;
    if (std::abs(next - s) < 1e-12 * (1.0 + std::abs(s))) return next;
    if (!(next > s_lo && next < s_hi)) next = 0.5 * (s_lo + s_hi);
    s = next;
  }
  return s;
}

double small_integrand(double y, double num) {
  // num(y) / (1 - e^y)^2 * e^{-y} / π with the 0/0 limit handled by the caller.
  const double d = std::expm1(y);
  return num * std::exp(-y) / (kPi * d * d);
}

}  // namespace

double lambda1_density(double y) {
  if (y == 0.0 || y <= -kLog2) return 0.0;
  const double d = std::expm1(y);
  return std::exp(-y) / (kPi * d * d);
}

double lambda1_mass_right(double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be > 0");
  return right_tail(std::expm1(eps)) / kPi;
}

double lambda1_mass_left(double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be > 0");
  if (eps >= kLog2) return 0.0;
  return left_tail(-std::expm1(-eps)) / kPi;
}

double lambda1_exp_moment_outside(double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be > 0");
  // ∫_X^∞ dx / (x^2 (x-1)) = -1/X - log(1 - 1/X) with X = e^eps.
  const double right = -std::exp(-eps) - std::log(-std::expm1(-eps));
  // -∫_{1/2}^{X} dx / (x^2 (1-x)) = 1/X + log((1-X)/X) - 2 with X = e^{-eps}.
  const double left = eps >= kLog2 ? 0.0 : std::exp(eps) + std::log(std::expm1(eps)) - 2.0;
  return (right + left) / kPi;
}

double lambda1_small_exp_defect(double eps) {
  static const boost::math::quadrature::gauss<double, 20> rule;
  const double a = std::min(eps, kLog2);
  return rule.integrate(
      [](double y) {
        if (std::abs(y) < 1e-5) return (0.5 - 5.0 * y / 6.0) / kPi;  // limit of (e^y-1-y) λ(y)
        return small_integrand(y, std::expm1(y) - y);
      },
      -a, eps);
}

double lambda1_small_variance(double eps) {
  static const boost::math::quadrature::gauss<double, 20> rule;
  const double a = std::min(eps, kLog2);
  return rule.integrate(
      [](double y) {
        if (std::abs(y) < 1e-5) return (1.0 - 2.0 * y) / kPi;
        return small_integrand(y, y * y);
      },
      -a, eps);
}

double xi_compensation(double eps) { return -lambda1_exp_moment_outside(eps) - lambda1_small_exp_defect(eps); }

double sample_lambda1_right(double eps, Rng& rng) {
  const double z_min = std::expm1(eps);
  const double total = right_tail(z_min);
  const double target = rng.uniform() * total;
  // Small jumps: G ≈ 1/z + 2 log z + 1. Large jumps: G ≈ 1/(3 x^3).
  double guess = std::pow(3.0 * target, -1.0 / 3.0);
  if (target > 2.0) {
    guess = 1.0 / target;
    guess = 1.0 / (target - 2.0 * std::log(guess) - 1.0);
  }
  const double s = invert_tail(
      right_tail, [](double z) { return -1.0 / (z * z * (1.0 + z) * (1.0 + z)); }, target, std::log(z_min), 50.0,
      std::log(std::max(guess, z_min)));
  return std::log1p(std::exp(s));
}

double sample_lambda1_left(double eps, Rng& rng) {
  if (eps >= kLog2) throw std::invalid_argument("no left jumps beyond log 2");
  const double v_min = -std::expm1(-eps);
  const double total = left_tail(v_min);
  // left_tail(v) is the mass on (1/2, 1-v) and decreases in v.
  const double u = rng.uniform() * total;
  // Near x = 1: F ≈ 1/v - 2 log v - 1.
  double guess = 1.0 / (u + 2.0);
  if (u > 2.0) guess = 1.0 / (u + 2.0 * std::log(1.0 / u) + 1.0);
  const double s = invert_tail(
      left_tail, [](double v) { return -1.0 / (v * v * (1.0 - v) * (1.0 - v)); }, u, std::log(v_min), std::log(0.5),
      std::log(std::clamp(guess, v_min, 0.5)));
  return std::log1p(-std::exp(s));
}

XiJumpSource::XiJumpSource(double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps_cut must be > 0");
  right_ = lambda1_mass_right(eps);
  left_ = lambda1_mass_left(eps);
  rate_ = right_ + left_;
  drift_ = kXiDrift + xi_compensation(eps);
  small_var_ = lambda1_small_variance(eps);
}

double XiJumpSource::next_size(Rng& rng) const {
  if (rng.uniform() * rate_ < right_) return sample_lambda1_right(eps_, rng);
  return sample_lambda1_left(eps_, rng);
}

}  // namespace peelkit::levy
