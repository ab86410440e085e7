#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "peelkit/peeling/cell_system.hpp"
#include "peelkit/peeling/decorate.hpp"
#include "peelkit/peeling/exploration.hpp"
#include "support.hpp"

using namespace peelkit;
using namespace peelkit::peeling;
using peelkit::testing::small_model;

TEST_SUITE("peeling") {
  TEST_CASE("growth step adds high edges") {
    const auto [next, out] = peel_step(LayeredBoundary::root(2), PeelEvent::C(2), Mode::finite);
    CHECK(next.p == 3);
    CHECK(next.h == 0);
    CHECK(next.word() == std::vector<bool>{true, true, true, false, false, false});
    CHECK(out.face_degree == 4);
    CHECK(out.height_increment == 0);
  }

  TEST_CASE("swallowing the last low edges completes a layer") {
    const LayeredBoundary s{3, 0, 2};
    REQUIRE(s.word() == std::vector<bool>{true, true, false, false, false, false});
    const auto [next, out] = peel_step(s, PeelEvent::G(Side::right, 1), Mode::finite);
    CHECK(next.p == 1);
    CHECK(next.h == 1);
    CHECK(next.word() == std::vector<bool>{true, true});
    CHECK(out.height_increment == 1);
    CHECK(out.swallowed == 1);
  }

  TEST_CASE("last swallow absorbs") {
    const auto [next, out] = peel_step(LayeredBoundary::root(1), PeelEvent::G(Side::left, 0), Mode::finite);
    CHECK(next.p == 0);
    CHECK(out.absorbed);
  }

  TEST_CASE("inconsistent events are rejected") {
    const LayeredBoundary s = LayeredBoundary::root(3);
    CHECK_THROWS_AS(peel_step(s, PeelEvent::G(Side::left, 3), Mode::finite), std::invalid_argument);
    CHECK_THROWS_AS(peel_step(s, PeelEvent::G(Side::left, 2), Mode::finite), std::invalid_argument);
    CHECK_THROWS_AS(peel_step(s, PeelEvent::G(Side::left, 2), Mode::infinite), std::invalid_argument);
    CHECK_THROWS_AS(peel_step(s, PeelEvent::C(0), Mode::finite), std::invalid_argument);
    CHECK_THROWS_AS(peel_step(LayeredBoundary{3, 0, 0}, PeelEvent::C(1), Mode::finite), std::logic_error);
  }

  TEST_CASE("compressed boundary tracks the explicit word") {
    Rng rng(7);
    long steps = 0;
    long violations = 0;
    for (int rep = 0; rep < 300 && steps < 200000; ++rep) {
      const Mode mode = rep % 2 == 0 ? Mode::finite : Mode::infinite;
      LayeredBoundary st = LayeredBoundary::root(20);
      ExplicitBoundary ex(20);
      for (int n = 0; n < 2000 && !st.absorbed(); ++n) {
        const PeelEvent e = transition_law(small_model(), mode, st.p).sample(rng);
        if (e.kind == PeelEvent::Kind::C && st.p + e.param > 4000) break;
        const auto [next, out] = peel_step(st, e, mode);
        const StepOutcome o2 = ex.apply(e, mode);
        ++steps;
        if (out.height_increment != o2.height_increment || out.absorbed != o2.absorbed) ++violations;
        st = next;
        if (st.absorbed()) break;
        if (st.word() != ex.labels() || st.h != ex.h() || !ex.low_arc_contiguous()) ++violations;
      }
    }
    CHECK(steps > 10000);
    CHECK(violations == 0);
  }

  TEST_CASE("constant perimeter with unit clocks") {
    ExplorationHooks hooks;
    hooks.event_source = [](const LayeredBoundary&, Rng&) { return PeelEvent::C(1); };
    hooks.clock_source = [](Rng&) { return 1.0; };
    Rng rng(1);
    const long ell = 16;
    const ExplorationTrace tr = run_exploration(small_model(), ell, Algorithm::uniform, Mode::finite, rng, 50, &hooks);
    REQUIRE(tr.T.size() == 51);
    for (std::size_t n = 0; n < tr.T.size(); ++n) {
      CHECK(tr.P[n] == ell);
      CHECK(tr.T[n] == doctest::Approx(static_cast<double>(n) / (2.0 * ell)));
    }
  }

  TEST_CASE("absorption at l=1") {
    ExplorationHooks hooks;
    hooks.event_source = [](const LayeredBoundary&, Rng&) { return PeelEvent::G(Side::left, 0); };
    Rng rng(1);
    const ExplorationTrace tr = run_exploration(small_model(), 1, Algorithm::layers, Mode::finite, rng, 10, &hooks);
    CHECK(tr.steps() == 1);
    CHECK(tr.absorbed);
    CHECK(tr.P.back() == 0);
  }

  TEST_CASE("trace bookkeeping") {
    Rng rng(3);
    for (int rep = 0; rep < 200; ++rep) {
      const ExplorationTrace tr = run_exploration(small_model(), 40, Algorithm::layers, Mode::finite, rng);
      CHECK(tr.H.front() == 0);
      CHECK(tr.T.front() == 0.0);
      std::size_t face = 0;
      for (std::size_t n = 0; n < tr.events.size(); ++n) {
        const PeelEvent& e = tr.events[n];
        const long dp = tr.P[n + 1] - tr.P[n];
        if (e.kind == PeelEvent::Kind::C) {
          REQUIRE(dp == e.param - 1);
          REQUIRE(tr.faces.at(face).degree == 2 * e.param);
          REQUIRE(tr.faces.at(face).step == static_cast<long>(n));
          REQUIRE(tr.faces.at(face).height == tr.H[n]);
          ++face;
        } else {
          REQUIRE(dp == -(e.param + 1));
          REQUIRE(e.param <= tr.P[n] - 1 - e.param);
        }
        const long dh = tr.H[n + 1] - tr.H[n];
        REQUIRE((dh == 0 || dh == 1));
        REQUIRE(tr.T[n + 1] >= tr.T[n]);
      }
      CHECK(face == tr.faces.size());
      CHECK(tr.absorbed);
    }
  }

  TEST_CASE("mean absorption time per unit perimeter is stable") {
    const auto mean_absorption = [](long ell) {
      Rng rng(static_cast<std::uint64_t>(ell));
      double s = 0.0;
      const int n = 10000;
      for (int i = 0; i < n; ++i) {
        s += static_cast<double>(run_exploration(small_model(), ell, Algorithm::uniform, Mode::finite, rng).steps());
      }
      return s / n / static_cast<double>(ell);
    };
    const double a = mean_absorption(32);
    const double b = mean_absorption(64);
    CHECK(b == doctest::Approx(a).epsilon(0.10));
  }

  TEST_CASE("cell system structure") {
    Rng rng(9);
    const CellSystem cs = run_cell_system(small_model(), 128, Algorithm::layers, 4, rng);
    CHECK(cs.root().birth_time == 0);
    CHECK(cs.root().birth_height == 0);
    for (std::size_t i = 0; i < cs.cells.size(); ++i) {
      const Cell& u = cs.cells[i];
      long prev = std::numeric_limits<long>::max();
      long prev_step = std::numeric_limits<long>::max();
      for (std::size_t k = 0; k < u.children.size(); ++k) {
        const Cell& v = cs.cells[u.children[k]];
        REQUIRE(v.label.size() == u.label.size() + 1);
        REQUIRE(v.label.back() == static_cast<int>(k + 1));
        REQUIRE(v.birth_time == u.birth_time + v.parent_jump);
        REQUIRE(v.birth_height == u.birth_height + u.H[v.parent_jump]);
        REQUIRE(2 * v.perimeter <= u.P[v.parent_jump] - 1);
        REQUIRE(v.perimeter >= cs.cutoff);
        REQUIRE(v.perimeter <= prev);
        if (v.perimeter == prev) REQUIRE(v.parent_jump < prev_step);
        prev = v.perimeter;
        prev_step = v.parent_jump;
      }
      // Every tracked swallow spawned exactly one child.
      const long tracked = std::count_if(u.swallows.begin(), u.swallows.end(),
                                         [&](const SwallowRecord& s) { return s.size >= cs.cutoff; });
      CHECK(tracked == static_cast<long>(u.children.size()));
    }
  }

  TEST_CASE("cell perimeter accounting replays from the events") {
    Rng rng(13);
    const CellSystem cs = run_cell_system(small_model(), 256, Algorithm::layers, 8, rng);
    for (const Cell& u : cs.cells) {
      long p = u.perimeter;
      std::size_t f = 0;
      std::size_t g = 0;
      for (std::size_t n = 0; n + 1 < u.P.size(); ++n) {
        REQUIRE(u.P[n] == p);
        if (f < u.faces.size() && u.faces[f].step == static_cast<long>(n)) {
          p += u.faces[f].degree / 2 - 1;
          ++f;
        } else {
          REQUIRE(g < u.swallows.size());
          REQUIRE(u.swallows[g].step == static_cast<long>(n));
          p -= u.swallows[g].size + 1;
          ++g;
        }
      }
      CHECK(u.P.back() == p);
      CHECK(f == u.faces.size());
      CHECK(g == u.swallows.size());
    }
  }

  TEST_CASE("cutoff above the perimeter leaves the root alone") {
    Rng rng(4);
    CHECK(run_cell_system(small_model(), 32, Algorithm::layers, 33, rng).cells.size() == 1);
    CHECK_THROWS_AS(run_cell_system(small_model(), 32, Algorithm::layers, 0, rng), std::invalid_argument);
  }

  TEST_CASE("ball perimeters") {
    Rng rng(17);
    const CellSystem cs = run_cell_system(small_model(), 512, Algorithm::layers, 4, rng);
    const std::vector<long> b0 = ball_perimeters(cs, 0);
    REQUIRE_FALSE(b0.empty());
    CHECK(b0.front() == 512);
    CHECK(std::is_sorted(b0.begin(), b0.end(), std::greater<>()));
    long top = 0;
    for (const Cell& c : cs.cells) top = std::max(top, c.birth_height + c.max_height());
    CHECK(ball_perimeters(cs, top + 1).empty());
    CHECK_THROWS_AS(ball_perimeters(cs, -1), std::invalid_argument);
    // The radius-1 boundary cannot exceed what the root created before its first layer completed.
    const Cell& root = cs.root();
    const auto first = std::find(root.H.begin(), root.H.end(), 1);
    if (first != root.H.end()) {
      long created = 512;
      for (const FaceRecord& f : root.faces) {
        if (f.step < first - root.H.begin()) created += f.degree / 2 - 1;
      }
      const std::vector<long> b1 = ball_perimeters(cs, 1);
      long total = 0;
      for (long v : b1) total += v;
      CHECK(total <= created);
    }
  }

  TEST_CASE("cell system is reproducible") {
    Rng a(99);
    Rng b(99);
    CHECK(run_cell_system(small_model(), 256, Algorithm::layers, 8, a).to_json() ==
          run_cell_system(small_model(), 256, Algorithm::layers, 8, b).to_json());
  }

  TEST_CASE("loop decoration") {
    const boltzmann::PartitionTable& t = small_model().table();
    for (long k = 1; k <= 64; ++k) {
      const double pl = loop_probability(t, k);
      CHECK(pl > 0.0);
      CHECK(pl <= 1.0);
    }
    Rng rng(5);
    CellSystem cs = run_cell_system(small_model(), 128, Algorithm::layers, 8, rng);
    DecorateOptions opt;
    opt.cutoff = 4;
    opt.max_depth = 2;
    const DecoratedSystem d = decorate_o2(small_model(), std::move(cs), rng, opt);
    CHECK(d.nesting == 0);
    for (const DecoratedSystem::Loop& loop : d.loops) {
      if (loop.half_degree < opt.cutoff) CHECK(loop.interior == nullptr);
      if (loop.interior) CHECK(loop.interior->nesting == 1);
    }
    CHECK(d.max_nesting() <= opt.max_depth);
  }
}
