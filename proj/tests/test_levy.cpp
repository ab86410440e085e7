#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "peelkit/levy/doob.hpp"
#include "peelkit/levy/functionals.hpp"
#include "peelkit/levy/growth_fragmentation.hpp"
#include "peelkit/levy/jump_path.hpp"
#include "peelkit/levy/lamperti.hpp"
#include "peelkit/levy/measure.hpp"
#include "peelkit/verify/stats.hpp"

using namespace peelkit;
using namespace peelkit::levy;

namespace {

constexpr double kPi = std::numbers::pi;
const double kLog2 = std::log(2.0);

double quad(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b);
}

JumpPath drift_path(double slope, double horizon) {
  JumpPath p;
  p.horizon = horizon;
  p.drift = slope;
  return p;
}

}  // namespace

TEST_SUITE("levy") {
  TEST_CASE("density is the image of the x-density under log") {
    for (double x : {0.6, 0.9, 1.1, 2.0, 7.5}) {
      const double fx = 1.0 / (kPi * x * x * (1.0 - x) * (1.0 - x));
      CHECK(lambda1_density(std::log(x)) == doctest::Approx(fx * x).epsilon(1e-12));
    }
    CHECK(lambda1_density(-0.8) == 0.0);
  }

  TEST_CASE("closed-form masses match quadrature") {
    const double right = quad([](double x) { return 1.0 / (kPi * x * x * (1 - x) * (1 - x)); }, 2.0,
                              std::numeric_limits<double>::infinity());
    CHECK(lambda1_mass_right(kLog2) == doctest::Approx(right).epsilon(1e-9));
    for (double eps : {0.01, 0.05, 0.3}) {
      CHECK(lambda1_mass_right(eps) ==
            doctest::Approx(quad(lambda1_density, eps, 60.0)).epsilon(1e-8));
      CHECK(lambda1_mass_left(eps) == doctest::Approx(quad(lambda1_density, -kLog2, -eps)).epsilon(1e-8));
      const double moment = quad([](double y) { return std::expm1(y) * lambda1_density(y); }, eps, 60.0) +
                            quad([](double y) { return std::expm1(y) * lambda1_density(y); }, -kLog2, -eps);
      CHECK(lambda1_exp_moment_outside(eps) == doctest::Approx(moment).epsilon(1e-7));
      const auto y2 = [](double y) { return std::abs(y) < 1e-8 ? 1.0 / kPi : y * y * lambda1_density(y); };
      const double var = quad(y2, -eps, 0.0) + quad(y2, 0.0, eps);
      CHECK(lambda1_small_variance(eps) == doctest::Approx(var).epsilon(1e-7));
    }
    CHECK(lambda1_mass_left(0.8) == 0.0);
  }

  TEST_CASE("empirical rate of large jumps") {
    Rng rng(31);
    const double horizon = 200.0;
    long count = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
      const JumpPath p = sample_xi(horizon, 0.05, rng);
      for (const Jump& j : p.jumps) count += j.size > kLog2;
    }
    const double expected = lambda1_mass_right(kLog2) * horizon * n;
    CHECK(std::abs(static_cast<double>(count) - expected) < 3.0 * std::sqrt(expected));
  }

  TEST_CASE("truncation levels agree above the coarser cut") {
    Rng a(1);
    Rng b(2);
    std::vector<double> big_a, big_b;
    for (int i = 0; i < 400; ++i) {
      for (const Jump& j : sample_xi(20.0, 0.1, a).jumps) {
        if (std::abs(j.size) > 0.1) big_a.push_back(j.size);
      }
      for (const Jump& j : sample_xi(20.0, 0.05, b).jumps) {
        if (std::abs(j.size) > 0.1) big_b.push_back(j.size);
      }
    }
    CHECK(verify::ks_two_sample(big_a, big_b) < 0.05);
  }

  TEST_CASE("samplers validate their inputs") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_xi(1.0, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_xi(1.0, 0.2, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_cauchy(0.0, 1.0, -1.0, rng, true), std::invalid_argument);
    const JumpPath z = sample_xi(0.0, 0.01, rng);
    CHECK(z.jumps.empty());
    CHECK(z.terminal() == 0.0);
    CHECK(sample_cauchy(3.0, 0.0, 0.01, rng, true).terminal() == 3.0);
  }

  TEST_CASE("cauchy symmetry and scaling") {
    Rng rng(41);
    std::vector<double> up, down, scaled, plain;
    for (int i = 0; i < 10000; ++i) {
      const double v = sample_cauchy(1.0, 1.0, 0.01, rng, false).terminal();
      up.push_back(v);
      down.push_back(2.0 - v);
      scaled.push_back(sample_cauchy(0.0, 2.0, 0.02, rng, false).terminal() / 2.0);
      plain.push_back(sample_cauchy(0.0, 1.0, 0.01, rng, false).terminal());
    }
    CHECK(verify::ks_two_sample(up, down) < 0.05);
    CHECK(verify::ks_two_sample(scaled, plain) < 0.05);
  }

  TEST_CASE("lamperti of the zero path") {
    const LampertiResult r = lamperti(drift_path(0.0, 10.0), -1.0, 1.0, {0.0, 0.5, 2.0});
    for (double v : r.values) CHECK(v == doctest::Approx(1.0));
  }

  TEST_CASE("lamperti of a pure negative drift") {
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.9};
    const LampertiResult r = lamperti(drift_path(-1.0, 50.0), -1.0, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(r.values[i] == doctest::Approx(1.0 - grid[i]).epsilon(1e-9));
      CHECK(r.tau[i] == doctest::Approx(-std::log1p(-grid[i])).epsilon(1e-9));
    }
    CHECK(r.zeta_finite);
    CHECK(r.zeta == doctest::Approx(1.0).epsilon(1e-9));
    const LampertiResult dead = lamperti(drift_path(-1.0, 50.0), -1.0, 1.0, {1.5});
    CHECK(dead.values[0] == 0.0);
    CHECK(std::isinf(dead.tau[0]));
  }

  TEST_CASE("lamperti start scaling") {
    // X(t) = x e^{-τ} with τ solving ∫ x e^{-s} ds = t.
    const LampertiResult r = lamperti(drift_path(-1.0, 50.0), -1.0, 2.0, {1.0});
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.zeta == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(lamperti(drift_path(0.0, 1.0), -1.0, 0.0, {0.0}), std::invalid_argument);
  }

  TEST_CASE("lifetime of the alpha=-1 transform has mean pi/2") {
    Rng rng(77);
    std::vector<double> z;
    LampertiOptions opt;
    opt.need_zeta = true;
    for (int i = 0; i < 3000; ++i) {
      Rng r = rng.child(static_cast<std::uint64_t>(i));
      const LampertiResult res = sample_lamperti(-1.0, 1.0, {0.0}, r, opt);
      REQUIRE(res.zeta_finite);
      z.push_back(res.zeta);
    }
    CHECK(std::abs(verify::mean(z) - kPi / 2.0) < 3.0 * verify::standard_error(z));
  }

  TEST_CASE("qnd estimator") {
    CHECK(qnd_estimator({0.1, 0.2, 0.3}, {0.30, 0.40, 1.0}, 1.0, 0.25) == doctest::Approx(0.5));
    CHECK(qnd_estimator({0.1, 0.2, 0.3}, {-0.30, 0.40, 1.0}, 0.15, 0.25) == doctest::Approx(0.25));
    CHECK(qnd_estimator(std::vector<double>{}, std::vector<double>{}, 1.0, 0.1) == 0.0);
    CHECK_THROWS_AS(qnd_estimator(std::vector<double>{0.1}, std::vector<double>{0.3}, 1.0, 0.0), std::invalid_argument);
    std::vector<XJump> xj(2);
    xj[0].t = 0.5;
    xj[0].size = -0.3;
    xj[1].t = 2.0;
    xj[1].size = 0.3;
    CHECK(qnd_estimator(xj, 0.5, 0.25, 1.0) == doctest::Approx(0.25));
    CHECK(qnd_estimator(xj, 0.5, 0.25, 4.0) == doctest::Approx(0.5));
  }

  TEST_CASE("lamperti distance") {
    CHECK(lamperti_distance(StepPath{{0.0, 1.0}, {2.0, 1.0}}, 2.0) == doctest::Approx(1.5));
    CHECK(lamperti_distance(StepPath{{0.0}, {1.0}}, 3.5) == doctest::Approx(3.5));
    CHECK_THROWS_AS(lamperti_distance(StepPath{{0.0, 1.0}, {1.0, 0.0}}, 2.0), std::domain_error);
    const LampertiResult r = lamperti(drift_path(-1.0, 50.0), -1.0, 1.0, {0.5});
    CHECK(lamperti_distance(r, 0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(lamperti_distance(r, 0, 0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
  }

  TEST_CASE("distance is finite up to the lifetime") {
    Rng rng(5);
    LampertiOptions opt;
    opt.need_zeta = true;
    for (int i = 0; i < 200; ++i) {
      const LampertiResult r = sample_lamperti(-1.0, 1.0, {0.2}, rng, opt);
      REQUIRE(r.zeta_finite);
      REQUIRE_FALSE(r.hit_limit);
      if (r.zeta > 0.2) CHECK(std::isfinite(lamperti_distance(r, 0, kPi)));
    }
  }

  TEST_CASE("upsilon ensemble") {
    Rng rng(8);
    const WeightedEnsemble tiny = sample_upsilon_up(1e-9, 200, rng);
    for (const JumpPath& p : tiny.first) CHECK(p.terminal() == doctest::Approx(1.0).epsilon(1e-6));
    const WeightedEnsemble e = sample_upsilon_up(1.0, 2000, rng);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e.weights[i] > 0.0) REQUIRE(e.first[i].infimum() > 0.0);
      if (e.weights[i] == 0.0) REQUIRE(e.first[i].infimum() <= 0.0);
    }
    CHECK(e.ess() > 0.0);
    CHECK(e.ess() <= static_cast<double>(e.size()));
    UpsilonOptions fine;
    fine.eps_cut = 0.005;
    Rng rng2(9);
    const WeightedEnsemble f = sample_upsilon_up(1.0, 2000, rng2, fine);
    CHECK(f.ess() / f.size() == doctest::Approx(e.ess() / e.size()).epsilon(0.10));
  }

  TEST_CASE("doob pair ensemble") {
    Rng rng(10);
    const WeightedEnsemble e0 = doob_pair_ensemble(1.0, 2.0, 1e-9, 100, rng);
    for (double w : e0.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-6));
    std::vector<double> survival;
    for (double t : {0.05, 0.2, 0.8}) {
      Rng r(11);
      const WeightedEnsemble e = doob_pair_ensemble(1.0, 2.0, t, 4000, r);
      double alive = 0.0;
      for (double w : e.weights) alive += w > 0.0;
      survival.push_back(alive / e.size());
    }
    CHECK(survival[0] >= survival[1]);
    CHECK(survival[1] >= survival[2]);
    CHECK_THROWS_AS(doob_pair_ensemble(0.0, 0.0, 1.0, 10, rng), std::invalid_argument);
  }

  // The weight has mean one, and the weighted total S = L + R stays at x + y
  // up to a bias linear in t.
  TEST_CASE("doob pair weighted total at small time") {
    for (double t : {0.02, 0.005}) {
      Rng rng(12);
      const WeightedEnsemble e = doob_pair_ensemble(1.0, 2.0, t, 20000, rng);
      std::vector<double> w_raw = e.weights;
      CHECK(std::abs(verify::mean(w_raw) - 1.0) < 3.0 * verify::standard_error(w_raw));
      const std::vector<double> w = e.normalized();
      double m = 0.0;
      double m2 = 0.0;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (w[i] == 0.0) continue;
        const double v = e.first[i].terminal() + e.second[i].terminal();
        m += w[i] * v;
        m2 += w[i] * v * v;
      }
      const double se = std::sqrt(std::max(0.0, m2 - m * m) / e.ess());
      CHECK(std::abs(m - 3.0) < 3.0 * se + 3.0 * t);
    }
  }

  TEST_CASE("growth-fragmentation basics") {
    Rng rng(3);
    const GFResult r = growth_fragmentation(1.0, 0.0, {0.0, 0.5, 1.0}, 0.05, rng);
    REQUIRE(r.states.size() == 3);
    CHECK(r.states[0].sizes == std::vector<double>{1.0});
    for (const GFState& s : r.states) CHECK(std::is_sorted(s.sizes.begin(), s.sizes.end(), std::greater<>()));
    for (std::size_t i = 1; i < r.cells.size(); ++i) CHECK(r.cells[i].start >= r.delta);
    CHECK_THROWS_AS(growth_fragmentation(1.0, 0.0, {0.0}, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(growth_fragmentation(1.0, 0.5, {0.0}, 0.1, rng), std::invalid_argument);
  }

  TEST_CASE("growth-fragmentation refinement keeps the large cells") {
    const std::vector<double> grid{0.0, 0.5};
    const double delta = 1.0 / 32.0;
    GFOptions opt;
    opt.resolution = delta / 8.0;
    std::vector<double> coarse, fine;
    long mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      Rng a = Rng::stream(3, 1, static_cast<std::uint64_t>(i));
      Rng b = Rng::stream(3, 1, static_cast<std::uint64_t>(i));
      const GFResult rc = growth_fragmentation(1.0, 0.0, grid, delta, a, opt);
      const GFResult rf = growth_fragmentation(1.0, 0.0, grid, delta / 2.0, b, opt);
      std::vector<double> big_c, big_f;
      for (double v : rc.states.back().sizes) if (v >= 2.0 * delta) big_c.push_back(v);
      for (double v : rf.states.back().sizes) if (v >= 2.0 * delta) big_f.push_back(v);
      coarse.push_back(big_c.empty() ? 0.0 : big_c.front());
      fine.push_back(big_f.empty() ? 0.0 : big_f.front());
      if (coarse.back() != fine.back()) ++mismatches;
    }
    CHECK(verify::ks_two_sample(coarse, fine) < 0.05);
    MESSAGE("coupled runs with a different largest cell: " << mismatches);
  }
}
