#include "doctest.h"

#include <cmath>

#include "avoid/granular.hpp"
#include "oracles.hpp"

using namespace avoid;
using namespace avoid::granular;

namespace {

std::vector<int> occupied(const GridIndicator& g) {
  std::vector<int> out;
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    if (g.at(i)) out.push_back(static_cast<int>(i));
  return out;
}

SearchOptions local(std::int64_t budget, std::uint64_t seed, int threads = 1) {
  SearchOptions o;
  o.mode = SearchMode::local_search;
  o.budget = budget;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("schedule clamps eps and follows the assignments") {
  auto s = schedule(0.5, DistanceSet::integers({1}), 2);
  CHECK(s.eps == 0.1);
  CHECK(s.requested_eps == 0.5);
  auto t = schedule(0.1, DistanceSet::integers({1}), 2);
  CHECK(std::fabs(t.m_tilde - (3 - 2 * std::sqrt(2.0))) < 1e-12);
  CHECK(t.eps2 == doctest::Approx(1e-4));
  CHECK(t.eps1 == doctest::Approx(t.m_tilde * 1e-4));
  CHECK(s.m_tilde == t.m_tilde);
  CHECK(t.big_r >= t.r0);
  CHECK(t.big_r >= 2 * 1.0 / t.eps2 * (1 - 1e-12));
  CHECK(t.k >= 10);
  CHECK(t.k2 == t.k * t.k);
  CHECK(t.source == ConstantSource::analytic_stub);
  CHECK(t.to_json()["constants"].get<std::string>().find("not certified") != std::string::npos);
  auto one = schedule(0.1, DistanceSet::integers({2}), 1);
  CHECK(one.m_tilde == doctest::Approx(0.5));
  auto user = schedule(0.1, DistanceSet::integers({1}), 2, SupersaturationConstants{0.01, 1e6});
  CHECK(user.source == ConstantSource::user_supplied);
  CHECK(user.k == 100);
  CHECK(user.big_r == 1e6);
  CHECK_THROWS_AS(schedule(0.0, DistanceSet::integers({1}), 2), PreconditionError);
  CHECK_THROWS_AS(schedule(0.1, DistanceSet::integers({1}), 3), PreconditionError);
}

TEST_CASE("exhaustive search on four cells of the line") {
  // D = {1}, R = 2: distance 1/2 is two cells of width 1/4.
  auto r = enumerate_granular(DistanceSet::integers({1}).scaled(Rational(1, 2)), 4, 1, {});
  CHECK(r.m_prime == Fraction(1, 2));
  CHECK(r.certified);
  CHECK(occupied(r.best) == std::vector<int>{0, 1});
  CHECK(r.mode == SearchMode::exhaustive);
}

TEST_CASE("exhaustive search refuses large grids") {
  SearchOptions o;
  CHECK_THROWS_WITH_AS(enumerate_granular(DistanceSet::integers({1}), 6, 2, o),
                       doctest::Contains("limit is 25 cells"), PreconditionError);
  CHECK_NOTHROW(enumerate_granular(DistanceSet::integers({1}).scaled(Rational(1, 3)), 5, 2, o));
}

TEST_CASE("exhaustive search matches the brute-force oracle") {
  Rng rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = trial % 3 == 0 ? 2 : 1;
    const int k = dim == 2 ? static_cast<int>(rng.between(2, 4)) : static_cast<int>(rng.between(3, 16));
    const int count = static_cast<int>(rng.between(1, 2));
    std::vector<Rational> values;
    std::vector<long double> cells;
    for (int i = 0; i < count; ++i) {
      Rational v(static_cast<std::int64_t>(rng.between(1, 97)), 100);
      values.push_back(v);
      cells.push_back(static_cast<long double>(to_double(v)) * k);
    }
    auto expected = oracle::brute_granular(k, dim, cells);
    if (expected.near_tie) continue;
    auto got = enumerate_granular(DistanceSet(values, DistanceMode::real), k, dim, {});
    CHECK(static_cast<int>(got.best.occupied_count()) == expected.size);
    CHECK(occupied(got.best) == expected.cells);
    CHECK(got.certified);
    ++compared;
  }
  CHECK(compared >= 50);
}

TEST_CASE("exhaustive optimum is monotone under refinement") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Rational d(static_cast<std::int64_t>(rng.between(5, 45)), 100);
    const DistanceSet set({d}, DistanceMode::real);
    const int k = static_cast<int>(rng.between(3, 12));
    auto coarse = enumerate_granular(set, k, 1, {});
    auto fine = enumerate_granular(set, 2 * k, 1, {});
    CHECK(fine.m_prime >= coarse.m_prime);
    // The refined coarse optimum is itself certified at the finer grid.
    CHECK(certify_avoiding(coarse.best.refined(2), set));
  }
}

TEST_CASE("local search is certified, deterministic and thread independent") {
  const auto d = DistanceSet::integers({1}).scaled(Rational(1, 4));
  auto a = enumerate_granular(d, 16, 2, local(200000, 7));
  auto b = enumerate_granular(d, 16, 2, local(200000, 7));
  auto c = enumerate_granular(d, 16, 2, local(200000, 7, 4));
  CHECK(a.certified);
  CHECK(a.best == b.best);
  CHECK(a.best == c.best);
  CHECK(a.visited == 200000);
  CHECK(a.m_prime >= Fraction(1, 10));
  CHECK(a.m_prime <= Fraction(12, 43));
  // Re-checked at twice the resolution the set stays violation-free.
  CHECK(certify_avoiding(a.best.refined(2), d));
  CHECK_THROWS_AS(enumerate_granular(d, 16, 2, local(0, 7)), PreconditionError);
}

TEST_CASE("local search reaches the exhaustive optimum on small grids") {
  const auto d = DistanceSet::integers({1}).scaled(Rational(1, 3));
  auto exact = enumerate_granular(d, 5, 2, {});
  auto found = enumerate_granular(d, 5, 2, local(50000, 1));
  CHECK(found.m_prime == exact.m_prime);
}

TEST_CASE("m_approx with overrides") {
  Overrides o;
  o.big_r = 2.0;
  o.k2 = 4;
  auto a = m_approx(0.1, DistanceSet::integers({1}), 1, o);
  CHECK(a.m_prime == Fraction(1, 2));
  CHECK(a.schedule.r_overridden);
  CHECK(a.guarantees == std::vector<std::string>{"lower bound, certified"});
  auto j = a.to_json();
  CHECK(j["schedule"]["R"] == 2.0);
  CHECK(j["m_prime"] == "1/2");
  CHECK_THROWS_WITH_AS(m_approx(0.01, DistanceSet::integers({1}), 2, {}), doctest::Contains("2^"),
                       PreconditionError);
}

TEST_CASE("product scan") {
  Overrides o;
  o.big_r = 8.0;
  o.k2 = 32;
  o.search = local(20000, 3);
  const auto one = DistanceSet::integers({1});
  auto rows = product_scan(one, one, {Rational(2), Rational(3)}, 2, o);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.certified);
    CHECK(r.product == r.lower1 * r.lower2);
  }
  CHECK(scan_csv(rows).rfind("t,lower_union,lower_d1,lower_d2,product,certified\r\n2,", 0) == 0);
  CHECK_THROWS_WITH_AS(product_scan(one, one, {Rational(4)}, 2, o), doctest::Contains("increase R"),
                       PreconditionError);
  CHECK_THROWS_AS(product_scan(one, one, {Rational(2)}, 1, o), PreconditionError);
  CHECK_THROWS_AS(product_scan(one, one, {Rational(2)}, 2, Overrides{}), PreconditionError);
}

TEST_CASE("search mode names") {
  CHECK(parse_mode("local") == SearchMode::local_search);
  CHECK(parse_mode("exhaustive") == SearchMode::exhaustive);
  CHECK(to_string(SearchMode::local_search) == "local-search");
  CHECK_THROWS_AS(parse_mode("greedy"), ParseError);
}
