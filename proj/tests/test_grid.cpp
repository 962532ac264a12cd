#include "doctest.h"

#include "avoid/grid.hpp"
#include "oracles.hpp"

using namespace avoid;

namespace {

GridIndicator cells_1d(double period, int k, std::initializer_list<int> occupied) {
  GridIndicator g(1, period, k);
  for (int i : occupied) g.set(g.index(i));
  return g;
}

}  // namespace

TEST_CASE("DistanceSet normalizes and validates") {
  auto d = DistanceSet::integers({5, 1, 3, 1});
  CHECK(d.integer_values() == std::vector<std::int64_t>{1, 3, 5});
  CHECK(d.r_min() == 1.0);
  CHECK(d.diam() == 5.0);
  CHECK_THROWS_AS(DistanceSet::integers({}), PreconditionError);
  CHECK_THROWS_AS(DistanceSet::integers({0, 1}), PreconditionError);
  CHECK_THROWS_AS(DistanceSet::reals({-1.0}), PreconditionError);
  CHECK_THROWS_AS(DistanceSet::parse("1,,2", DistanceMode::integer), ParseError);
  CHECK_THROWS_AS(DistanceSet::parse("0.5", DistanceMode::integer), PreconditionError);
  auto r = DistanceSet::parse("0.5, 1/3", DistanceMode::real);
  CHECK(r.exact_min() == Rational(1, 3));
  CHECK(r.scaled(Rational(6)).mode() == DistanceMode::integer);
  CHECK(r.scaled(Rational(6)).integer_values() == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("density counts occupied cells") {
  CHECK(density(GridIndicator::full(2, 1.0, 5)) == 1.0);
  CHECK(density(GridIndicator(2, 1.0, 5)) == 0.0);
  GridIndicator g(2, 1.0, 4);
  for (int i = 0; i < 4; ++i) g.set(i, i);
  CHECK(density(g) == 0.25);
  CHECK(exact_density(g) == Fraction(1, 4));
}

TEST_CASE("torus_violations reports a pair at exact center distance") {
  auto d = DistanceSet::integers({1});
  // cells 0 and 4 of width 1/4 have centers exactly 1 apart
  auto pair = cells_1d(2.0, 8, {0, 4});
  auto exact_hits = torus_violations(pair, d, SlackMode::exact_center);
  CHECK(exact_hits == std::vector<CellPair>{{0, 4}});
  CHECK(torus_violations(pair, d, SlackMode::conservative) == std::vector<CellPair>{{0, 4}});
  // a lone cell only meets its translates at distance 2, outside (0.75, 1.25)
  CHECK(torus_violations(cells_1d(2.0, 8, {0}), d, SlackMode::conservative).empty());
}

TEST_CASE("torus_violations on empty grid and self translates") {
  auto d = DistanceSet::integers({1});
  CHECK(torus_violations(GridIndicator(2, 3.0, 6), d, SlackMode::conservative).empty());
  // L = 3, k = 3: the band is the open interval (0, 2), translates sit at 3
  auto g = cells_1d(3.0, 3, {0});
  CHECK(torus_violations(g, d, SlackMode::exact_center).empty());
  CHECK(torus_violations(g, d, SlackMode::conservative).empty());
  // L = 1, k = 1: the cell meets its own translate at distance exactly 1
  auto unit = cells_1d(1.0, 1, {0});
  CHECK(torus_violations(unit, d, SlackMode::exact_center) == std::vector<CellPair>{{0, 0}});
  CHECK(torus_violations(unit, d, SlackMode::conservative) == std::vector<CellPair>{{0, 0}});
}

TEST_CASE("conservative band boundary is open") {
  // centers 2 cells apart (distance 1/2 at L = 1, k = 4) with d = 3/4:
  // |1/2 - 3/4| = 1/4 equals the cell diagonal, so no violation; the
  // half-open cells [0, 1/4) and [1/2, 3/4) realize only distances in (1/4, 3/4).
  auto g = cells_1d(1.0, 4, {0, 2});
  CHECK(torus_violations(g, DistanceSet::reals({0.75}), SlackMode::conservative).empty());
  CHECK(!torus_violations(g, DistanceSet::reals({0.7}), SlackMode::conservative).empty());
  // dim 2: offset (1, 1) has center distance sqrt(2) cells; d = 2 sqrt(2) cells
  // sits exactly at the band edge, d slightly smaller falls inside
  GridIndicator two(2, 1.0, 8);
  two.set(0, 0);
  two.set(1, 1);
  const double h = 1.0 / 8;
  CHECK(torus_violations(two, DistanceSet::reals({2 * std::sqrt(2.0) * h + 1e-6}),
                         SlackMode::conservative)
            .empty());
  CHECK(!torus_violations(two, DistanceSet::reals({2 * std::sqrt(2.0) * h - 1e-6}),
                          SlackMode::conservative)
             .empty());
}

TEST_CASE("exact-center violations are contained in conservative ones") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int k = 2 + static_cast<int>(rng.below(dim == 1 ? 30 : 12));
    const double period = 0.5 + static_cast<double>(rng.below(8)) / 2;
    auto g = oracle::random_grid(rng, dim, period, k, 0.3);
    // distances that are exact multiples of the cell width hit centers exactly
    const double h = period / k;
    auto d = DistanceSet::reals({h * static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(k))),
                                 0.37 + rng.uniform()});
    auto ex = torus_violations(g, d, SlackMode::exact_center);
    auto co = torus_violations(g, d, SlackMode::conservative);
    CHECK(std::includes(co.begin(), co.end(), ex.begin(), ex.end()));
  }
}

TEST_CASE("conservative certificate is sound against a geometric oracle") {
  Rng rng(202);
  int certified = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int k = 3 + static_cast<int>(rng.below(dim == 1 ? 24 : 10));
    const double period = 1.0 + static_cast<double>(rng.below(6)) / 2;
    auto g = oracle::random_grid(rng, dim, period, k, dim == 1 ? 0.2 : 0.08);
    auto d = DistanceSet::reals({0.3 + 1.7 * rng.uniform()});
    const bool ok = certify_avoiding(g, d);
    if (ok) {
      ++certified;
      CHECK_FALSE(oracle::truly_violates(g, d.values()));
      // the certificate survives halving the cell width
      CHECK(certify_avoiding(g.refined(2), d));
    }
  }
  CHECK(certified > 20);
}

TEST_CASE("conservative mode flags every genuine violation") {
  Rng rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int k = 3 + static_cast<int>(rng.below(dim == 1 ? 24 : 10));
    auto g = oracle::random_grid(rng, dim, 2.0, k, 0.1);
    auto d = DistanceSet::reals({0.3 + 1.7 * rng.uniform()});
    if (oracle::truly_violates(g, d.values())) CHECK_FALSE(certify_avoiding(g, d));
  }
}

TEST_CASE("window_violations ignores wraparound") {
  auto d = DistanceSet::integers({1});
  // cells 0 and 3 of a window of side 1 are 3/4 apart; on the torus of period 1
  // every cell also meets its own translate at distance 1
  auto g = cells_1d(1.0, 4, {0, 3});
  CHECK(window_violations(g, d, SlackMode::conservative).empty());
  CHECK_FALSE(certify_avoiding(g, d));
}

TEST_CASE("periodize reproduces the alternating unit intervals") {
  auto d = DistanceSet::integers({1});
  auto p = periodize(GridIndicator::full(1, 1.0, 1), d);
  CHECK(p.tiling.period() == 2.0);
  CHECK(exact_density(p.tiling) == Fraction(1, 2));
  CHECK(certify_avoiding(p.tiling, d));
  auto fine = periodize(GridIndicator::full(1, 1.0, 4), d);
  CHECK(fine.tiling.period() == 2.0);
  CHECK(exact_density(fine.tiling) == Fraction(1, 2));
}

TEST_CASE("periodize of a half-cell window") {
  auto d = DistanceSet::integers({1});
  auto p = periodize(cells_1d(2.0, 4, {0}), d);
  CHECK(p.tiling.period() == 3.0);
  CHECK(p.gap_cells == 2);
  CHECK(exact_density(p.tiling) == Fraction(1, 6));
  auto empty = periodize(GridIndicator(2, 2.0, 4), d);
  CHECK(density(empty.tiling) == 0.0);
  CHECK_THROWS_AS(periodize(cells_1d(2.0, 4, {0, 2}), d), PreconditionError);
}

TEST_CASE("periodize density bound and certificate on random windows") {
  Rng rng(404);
  int tried = 0;
  for (int trial = 0; trial < 400 && tried < 60; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int k = 4 + static_cast<int>(rng.below(dim == 1 ? 28 : 12));
    const double side = 1.0 + static_cast<double>(rng.below(4));
    auto w = oracle::random_grid(rng, dim, side, k, dim == 1 ? 0.2 : 0.1);
    auto d = DistanceSet::reals({0.5 + rng.uniform()});
    if (!window_violations(w, d, SlackMode::conservative).empty()) continue;
    ++tried;
    auto p = periodize(w, d);
    CHECK(certify_avoiding(p.tiling, d));
    const double h = side / k;
    // gap = diam(D) + cell diagonal, rounded up: at most (1 + sqrt(dim)) extra cells
    const double bound = density(w) / std::pow(1 + d.diam() / side, dim) -
                         dim * (1 + std::sqrt(double(dim))) * h / side;
    CHECK(density(p.tiling) >= bound - 1e-12);
    // integer-spaced D = {1}: periodic avoiding sets never beat 1/2 on the line
    if (dim == 1 && d.diam() == 1.0) CHECK(density(p.tiling) <= 0.5);
  }
  CHECK(tried >= 30);
}

TEST_CASE("shrink_cells keeps a centered block") {
  auto g = cells_1d(1.0, 4, {1});
  auto s = shrink_cells(g, 0.1);
  CHECK(s.resolution() == 16);
  CHECK(exact_density(s) == Fraction(1, 8));
  CHECK(s.at(5));
  CHECK(s.at(6));
  CHECK_FALSE(s.at(4));
  CHECK_FALSE(s.at(7));
  CHECK(density(shrink_cells(GridIndicator(2, 1.0, 5), 0.05)) == 0.0);
  CHECK_THROWS_AS(shrink_cells(g, 0.0), PreconditionError);
  // eps clamps to 1/10
  CHECK(shrink_fraction(0.5, 2) == shrink_fraction(0.1, 2));
  // fraction rounding up to the full cell leaves the refined set
  auto tiny = shrink_cells(g, 1e-12);
  CHECK(tiny == g.refined(4));
}

TEST_CASE("shrink_cells density and avoidance properties") {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int k = 3 + static_cast<int>(rng.below(dim == 1 ? 20 : 8));
    const double eps = 0.01 + 0.09 * rng.uniform();
    auto g = oracle::random_grid(rng, dim, 2.0, k, 0.3);
    auto s = shrink_cells(g, eps);
    CHECK(density(s) <= density(g));
    const double f = shrink_fraction(eps, dim);
    CHECK(density(s) >= density(g) * std::pow(f, dim) * (1 - 3.0 / k) - 1e-12);
    CHECK(s.subset_of(g.refined(k)));
    auto d = DistanceSet::reals({0.4 + rng.uniform()});
    if (certify_avoiding(g, d)) CHECK(certify_avoiding(s, d));
  }
}

TEST_CASE("grid JSON and run-length round trip") {
  Rng rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = oracle::random_grid(rng, 2, 1.5, 7, 0.4);
    auto back = grid_from_json(nlohmann::json::parse(to_json(g).dump()));
    CHECK(back == g);
  }
  CHECK(encode_runs(std::vector<std::uint8_t>{0, 0, 1, 1, 1, 0}) == "0:2 1:3 0:1");
  CHECK_THROWS_AS(decode_runs("0:2 1:3", 6), ParseError);
  CHECK_THROWS_AS(decode_runs("2:6", 6), ParseError);
  CHECK_THROWS_AS(grid_from_json(nlohmann::json{{"dim", 2}}), ParseError);
  GridIndicator small(2, 1.0, 2);
  small.set(1, 0);
  CHECK(to_pbm(small) == "P1\n2 2\n0 1\n0 0\n");
}

TEST_CASE("BoundsReport validation") {
  BoundsReport r;
  r.lower = 0.6;
  r.upper = 0.5;
  CHECK_THROWS(r.validate());
  r.lower = 0.25;
  CHECK_NOTHROW(r.validate());
}
