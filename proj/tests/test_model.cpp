#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "peelkit/peeling/exploration.hpp"
#include "peelkit/verify/stats.hpp"
#include "support.hpp"

using namespace peelkit;
using namespace peelkit::boltzmann;
using peelkit::testing::small_model;

namespace {

constexpr double kPi = std::numbers::pi;

/// Total probability of every event at p.
double total_mass(const StepLaw& law) { return law.swallow_mass() + law.growth_tail(0); }

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("preset weights") {
    const WeightSequence q = WeightSequence::preset("budd-o2-example");
    CHECK(q(1) == doctest::Approx(1.0 - 2.0 / kPi).epsilon(1e-12));
    CHECK(q(2) == doctest::Approx(2.0 / (9.0 * kPi * kPi)).epsilon(1e-12));
    CHECK_THROWS_AS(WeightSequence::preset("nope"), std::invalid_argument);
  }

  TEST_CASE("table weights") {
    const WeightSequence q = WeightSequence::from_table({{1, 0.5}});
    CHECK(q(1) == 0.5);
    CHECK(q(2) == 0.0);
    CHECK_THROWS_AS(WeightSequence::from_table({{1, -0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(WeightSequence::from_table({{1, 0.0}, {2, 0.0}}), std::invalid_argument);
  }

  TEST_CASE("h_up values") {
    CHECK(h_up(1) == doctest::Approx(1.0));
    CHECK(h_up(2) == doctest::Approx(1.5));
    CHECK(h_up(3) == doctest::Approx(15.0 / 8.0));
    CHECK_THROWS(h_up(0));
  }

  TEST_CASE("solved preset") {
    const PartitionTable& t = small_model().table();
    CHECK(t.W(0) == doctest::Approx(1.0));
    CHECK(t.c() == doctest::Approx(3.0 * kPi).epsilon(1e-6));
    CHECK(t.p() == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-4));
    CHECK(t.residual() <= 1e-9);
    CHECK(tutte_residual(t, 256) <= 1e-9);
    CHECK(t.diagnostics().type2);
    CHECK(f_up(t, 5) == doctest::Approx(h_up(5) / t.w(5)));
  }

  TEST_CASE("independent Newton scheme agrees") {
    const PartitionTable& t = small_model().table();
    const NewtonSolution n = solve_partition_function_newton(WeightSequence::preset("budd-o2-example"), 256);
    CHECK(n.c == doctest::Approx(t.c()).epsilon(1e-6));
    CHECK(n.p == doctest::Approx(t.p()).epsilon(1e-3));
  }

  TEST_CASE("subcritical single weight is flagged") {
    const PartitionTable t = solve_partition_function(WeightSequence::from_table({{1, 0.05}}), 64);
    CHECK(t.W(0) == doctest::Approx(1.0));
    CHECK_FALSE(t.diagnostics().type2);
  }

  TEST_CASE("solver rejects a small table range") {
    CHECK_THROWS_AS(solve_partition_function(WeightSequence::preset("budd-o2-example"), 16), std::invalid_argument);
  }

  TEST_CASE("finite laws are normalized") {
    for (long p : {1L, 2L, 3L, 10L, 64L, 200L}) {
      CHECK(total_mass(transition_law(small_model(), Mode::finite, p)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("finite p=1 swallow probability") {
    const PartitionTable& t = small_model().table();
    const StepLaw law = transition_law(small_model(), Mode::finite, 1);
    const double g = law.prob(PeelEvent::G(Side::left, 0));
    CHECK(g == doctest::Approx(t.W(0) * t.W(0) / t.W(1)).epsilon(1e-12));
    CHECK(law.prob(PeelEvent::G(Side::right, 0)) == 0.0);
    CHECK(law.swallow_mass() == doctest::Approx(g).epsilon(1e-12));
  }

  TEST_CASE("infinite laws never leave the positive half-line") {
    for (long p : {1L, 2L, 7L, 100L}) {
      const StepLaw law = transition_law(small_model(), Mode::infinite, p);
      CHECK(law.prob(PeelEvent::G(Side::left, p - 1)) == 0.0);
      CHECK(law.prob(PeelEvent::G(Side::right, p - 1)) == 0.0);
    }
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const peeling::ExplorationTrace tr =
          peeling::run_exploration(small_model(), 3, peeling::Algorithm::uniform, Mode::infinite, rng, 200);
      for (long v : tr.P) REQUIRE(v > 0);
    }
  }

  TEST_CASE("h_up is harmonic for the walk") {
    for (long p = 1; p <= 64; ++p) {
      const double mass = total_mass(transition_law(small_model(), Mode::infinite, p));
      CHECK(std::abs(mass - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("negative steps have a Cauchy tail") {
    const PartitionTable& t = small_model().table();
    const double m1 = 200.0, m2 = 1600.0;
    const double slope = std::log(t.nu(-1600) / t.nu(-200)) / std::log(m2 / m1);
    CHECK(slope >= -2.1);
    CHECK(slope <= -1.9);
  }

  TEST_CASE("swallow mass far out approaches its limit") {
    const PeelingModel& m = small_model();
    CHECK(m.swallow_limit() == doctest::Approx(1.0 / kPi).epsilon(1e-6));
    const double end = static_cast<double>(m.cached_end());
    for (Mode mode : {Mode::finite, Mode::infinite}) {
      const double near = m.swallow_mass(mode, static_cast<long>(40 * end));
      const double far = m.swallow_mass(mode, static_cast<long>(4000 * end));
      CHECK(std::abs(far - m.swallow_limit()) < std::abs(near - m.swallow_limit()));
    }
  }

  // Finite-mode paths that survive n steps against infinite-mode paths
  // weighted by f_up(l)/f_up(P(n)), restricted to swallows of the smaller hole,
  // with tied swallows counted once.
  TEST_CASE("finite law is the reweighted infinite law") {
    const PeelingModel& m = small_model();
    const PartitionTable& t = m.table();
    const long ell = 6;
    const long n = 12;
    const int N = 10000;
    std::vector<double> fin_end, fin_max;
    Rng rf(21);
    for (int i = 0; i < N; ++i) {
      const peeling::ExplorationTrace tr =
          peeling::run_exploration(m, ell, peeling::Algorithm::uniform, Mode::finite, rf, n);
      if (tr.steps() < n || tr.absorbed) continue;
      fin_end.push_back(static_cast<double>(tr.P.back()));
      fin_max.push_back(static_cast<double>(*std::max_element(tr.P.begin(), tr.P.end())));
    }
    std::vector<double> inf_end, inf_max, weight;
    Rng ri(22);
    for (int i = 0; i < N; ++i) {
      const peeling::ExplorationTrace tr =
          peeling::run_exploration(m, ell, peeling::Algorithm::uniform, Mode::infinite, ri, n);
      double w = f_up(t, ell) / f_up(t, tr.P.back());
      for (std::size_t k = 0; k < tr.events.size(); ++k) {
        const PeelEvent& e = tr.events[k];
        if (e.kind != PeelEvent::Kind::G) continue;
        const long rest = tr.P[k] - 1 - e.param;
        if (e.param > rest) w = 0.0;
        if (e.param == rest) w *= 0.5;
      }
      inf_end.push_back(static_cast<double>(tr.P.back()));
      inf_max.push_back(static_cast<double>(*std::max_element(tr.P.begin(), tr.P.end())));
      weight.push_back(w);
    }
    CHECK(verify::ks_two_sample(fin_end, inf_end, weight) < 0.05);
    CHECK(verify::ks_two_sample(fin_max, inf_max, weight) < 0.05);
    // The mean weight estimates the survival probability of the finite walk.
    const double survival = static_cast<double>(fin_end.size()) / N;
    CHECK(verify::mean(weight) == doctest::Approx(survival).epsilon(0.05));
  }
}
