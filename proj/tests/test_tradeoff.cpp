#include <doctest.h>

#include <cmath>

#include "structcov/asymptotics.hpp"
#include "structcov/error.hpp"
#include "structcov/influence.hpp"
#include "structcov/tradeoff.hpp"

using namespace structcov;

TEST_CASE("breakdown grid") {
  const auto g = breakdown_grid(0.05, 0.50, 0.01);
  REQUIRE(g.size() == 46);
  CHECK(g.front() == doctest::Approx(0.05));
  CHECK(g.back() == doctest::Approx(0.50));
  CHECK(g.back() <= 0.5);
  CHECK_THROWS_AS(breakdown_grid(0.0, 0.5, 0.1), InvalidArgument);
  CHECK_THROWS_AS(breakdown_grid(0.1, 0.6, 0.1), InvalidArgument);
  CHECK_THROWS_AS(breakdown_grid(0.3, 0.2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(breakdown_grid(0.1, 0.2, 0.0), InvalidArgument);
}

TEST_CASE("a tradeoff row agrees with the scalar and GES routines") {
  const TradeoffRow r = tradeoff_point(3, 4.2);
  const AsymptoticScalars a = biweight_scalars(3, 4.2);
  const GesIndices g = ges_indices(3, 4.2);
  CHECK(r.breakdown == doctest::Approx(breakdown_for_cutoff(3, 4.2)));
  CHECK(r.are_regression == doctest::Approx(a.are_regression()));
  CHECK(r.are_shape_direction == doctest::Approx(a.are_shape()));
  CHECK(r.are_scale == doctest::Approx(a.are_scale()));
  CHECK(r.g1 == doctest::Approx(g.g1));
  CHECK(r.g2 == doctest::Approx(g.g2));
  CHECK(r.g3 == doctest::Approx(g.g3));
}

TEST_CASE("default curve") {
  const TradeoffCurve curve = tradeoff({2, 5, 10}, breakdown_grid(0.05, 0.50, 0.01), 2);
  REQUIRE(curve.rows.size() == 3 * 46);
  CHECK(curve.rows.front().k == 2);
  CHECK(curve.rows.back().k == 10);

  const TradeoffRow& k2_half = curve.rows[45];
  CHECK(k2_half.breakdown == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::fabs(k2_half.are_regression - 0.580) < 0.002);
  CHECK(std::fabs(k2_half.are_shape_direction - 0.376) < 0.002);
  CHECK(std::fabs(k2_half.are_scale - 0.755) < 0.002);

  // efficiencies fall as the breakdown point rises
  for (std::size_t i = 1; i < 46; ++i) {
    CHECK(curve.rows[i].are_regression < curve.rows[i - 1].are_regression);
    CHECK(curve.rows[i].c < curve.rows[i - 1].c);
  }

  REQUIRE(curve.summary.size() == 3);
  const TradeoffSummary& k10 = curve.summary[2];
  CHECK(k10.k == 10);
  const TradeoffArgmin& g1 = k10.argmins[0];
  CHECK(g1.index == "g1");
  CHECK_FALSE(g1.at_boundary);
  CHECK(std::fabs(g1.at.breakdown - 0.42) <= 0.01);
  CHECK(std::fabs(g1.at.g1 - 3.426) <= 0.01);
  CHECK(std::fabs(g1.at.are_regression - 0.960) <= 0.003);
  CHECK(std::fabs(g1.at.are_shape_direction - 0.949) <= 0.003);
  CHECK(std::fabs(g1.at.are_scale - 0.979) <= 0.003);

  // each refined minimum lies at or below every grid value for that k
  for (std::size_t s = 0; s < curve.summary.size(); ++s) {
    for (const auto& m : curve.summary[s].argmins) {
      for (const auto& row : curve.rows) {
        if (row.k != curve.summary[s].k) continue;
        const double v = m.index == "g1" ? row.g1 : m.index == "g2" ? row.g2 : row.g3;
        const double best = m.index == "g1" ? m.at.g1 : m.index == "g2" ? m.at.g2 : m.at.g3;
        CHECK(best <= v + 1e-12);
      }
    }
  }
}

TEST_CASE("thread count does not change the curve") {
  const auto grid = breakdown_grid(0.1, 0.5, 0.05);
  const TradeoffCurve a = tradeoff({1, 4}, grid, 1);
  const TradeoffCurve b = tradeoff({1, 4}, grid, 4);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].c == b.rows[i].c);
    CHECK(a.rows[i].g2 == b.rows[i].g2);
  }
  CHECK_THROWS_AS(tradeoff({0}, grid), InvalidArgument);
}
