#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "peelkit/verify/stats.hpp"

using namespace peelkit;
using namespace peelkit::verify;

TEST_SUITE("stats") {
  TEST_CASE("ks of identical samples is zero") {
    const std::vector<double> a{0.3, 1.2, 1.2, 5.0};
    CHECK(ks_two_sample(a, a) == doctest::Approx(0.0));
  }

  TEST_CASE("ks of disjoint supports is one") {
    CHECK(ks_two_sample({1, 2, 3}, {10, 11}) == doctest::Approx(1.0));
    CHECK(ks_two_sample({10, 11}, {1, 2, 3}) == doctest::Approx(1.0));
  }

  TEST_CASE("ks of interleaved samples") {
    CHECK(ks_two_sample({1, 2, 3}, {1.5, 2.5, 3.5}) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("ks handles ties and infinities") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(ks_two_sample({1, 1, inf}, {1, 1, inf}) == doctest::Approx(0.0));
    CHECK(ks_two_sample({1, 1, 2, 2}, {1, 2}) == doctest::Approx(0.0));
    CHECK(ks_two_sample({0, inf}, {0, 0}) == doctest::Approx(0.5));
  }

  TEST_CASE("weighted ks matches the replicated sample") {
    const std::vector<double> a{1, 2, 2, 3};
    CHECK(ks_two_sample(a, {1, 2, 3}, {1, 2, 1}) == doctest::Approx(0.0));
    CHECK(ks_two_sample({1}, {1, 5}, {1, 0}) == doctest::Approx(0.0));
  }

  TEST_CASE("ks rejects bad weights") {
    CHECK_THROWS_AS(ks_two_sample({1, 2}, {1, 2}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(ks_two_sample({1, 2}, {1, 2}, {1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(ks_two_sample({1, 2}, {1, 2}, {1}), std::invalid_argument);
    CHECK_THROWS(ks_two_sample({}, {1}));
  }

  TEST_CASE("bootstrap interval brackets the statistic") {
    Rng rng(11);
    std::vector<double> a, b;
    for (int i = 0; i < 400; ++i) {
      a.push_back(rng.normal());
      b.push_back(rng.normal() + 0.3);
    }
    const double ks = ks_two_sample(a, b);
    Rng boot(3);
    const Interval ci = ks_bootstrap(a, b, {}, 200, boot);
    CHECK(ci.lo <= ks);
    CHECK(ci.hi >= ks);
    CHECK(ci.lo >= 0.0);
    CHECK(ci.hi <= 1.0);
  }

  TEST_CASE("kendall tau-b") {
    CHECK(kendall_tau({1, 2, 3, 4}, {1, 2, 3, 4}) == doctest::Approx(1.0));
    CHECK(kendall_tau({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(kendall_tau({1, 2, 3}, {1, 3, 2}) == doctest::Approx(1.0 / 3.0));
    CHECK(kendall_tau({1, 2, 3}, {0.2, 0.2, 0.1}) == doctest::Approx(-std::sqrt(2.0 / 3.0)));
  }

  TEST_CASE("quantiles") {
    CHECK(quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({3, 1, 2, 4}, 0.0) == doctest::Approx(1.0));
    CHECK(quantile({3, 1, 2, 4}, 1.0) == doctest::Approx(4.0));
    CHECK(weighted_quantile({1, 2, 3}, {1, 1, 2}, 0.5) == doctest::Approx(2.0));
    CHECK(weighted_quantile({1, 2, 3}, {1, 1, 2}, 0.51) == doctest::Approx(3.0));
    const auto row = quantile_row({5, 4, 3, 2, 1});
    for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i] >= row[i - 1]);
  }

  TEST_CASE("mean and standard error") {
    CHECK(mean({1, 2, 3, 4}) == doctest::Approx(2.5));
    CHECK(standard_error({1, 2, 3, 4}) == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  }
}
