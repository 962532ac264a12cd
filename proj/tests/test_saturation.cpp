#include "doctest.h"

#include <cmath>
#include <numbers>

#include "avoid/saturation.hpp"
#include "oracles.hpp"

using namespace avoid;
using namespace avoid::saturation;

namespace {

constexpr double kPi = std::numbers::pi;

GridIndicator disc(double period, int k, double cx, double cy, double radius) {
  GridIndicator g(2, period, k);
  const double h = period / k;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto [x, y] = g.coords(i);
    if (std::hypot((x + 0.5) * h - cx, (y + 0.5) * h - cy) < radius) g.set(i);
  }
  return g;
}

}  // namespace

TEST_CASE("circle measure is symmetric and normalized") {
  auto sigma = circle_measure(1.0, 720);
  CHECK(sigma.atoms().size() == 720);
  CHECK(sigma.support_radius_min() == doctest::Approx(1.0));
  CHECK(sigma.support_radius_max() == doctest::Approx(1.0));
  CHECK_THROWS_AS(circle_measure(1.0, 7), PreconditionError);
  CHECK_THROWS_AS(AdmissibleMeasure(1, {{1.0, 0.0, 1.0}}, AdmissibleMeasure::Kind::two_point, 1.0),
                  PreconditionError);
  CHECK_THROWS_AS(AdmissibleMeasure(1, {{0.0, 0.0, 1.0}}, AdmissibleMeasure::Kind::two_point, 0.0),
                  PreconditionError);
}

TEST_CASE("parse_measure") {
  CHECK(parse_measure("circle:1:720").atoms().size() == 720);
  CHECK(parse_measure("two-point:0.5").radius() == 0.5);
  CHECK_THROWS_AS(parse_measure("square:1"), ParseError);
  CHECK_THROWS_AS(parse_measure("circle:1"), ParseError);
}

TEST_CASE("atomic circle transform tracks J0") {
  auto sigma = circle_measure(1.0, 720);
  for (double xi = 0.0; xi <= 5.0; xi += 0.37) {
    CHECK(sigma.transform(xi, 0.0) == doctest::Approx(sigma.continuous_transform(xi)).epsilon(1e-9));
    const double c = std::cos(0.4), s = std::sin(0.4);
    CHECK(std::fabs(sigma.transform(xi * c, xi * s) - std::cyl_bessel_j(0.0, 2 * kPi * xi)) < 1e-9);
  }
}

TEST_CASE("J0 tail supremum") {
  CHECK(bessel_j0_tail_sup(0.0) == 1.0);
  // |J0(2)| = 0.2239 is below the extremum at the first zero of J1, 3.8317.
  CHECK(bessel_j0_tail_sup(2.0) == doctest::Approx(0.402759).epsilon(1e-5));
  CHECK(bessel_j0_tail_sup(3.9) == doctest::Approx(std::fabs(std::cyl_bessel_j(0.0, 3.9))));
  auto sigma = circle_measure(1.0, 720);
  for (double t = 0.5; t < 200; t *= 1.7) {
    // |J0(x)| <= sqrt(2 / (pi x)) with x = 2 pi T.
    CHECK(sigma.decay(t) <= 1.0 / (kPi * std::sqrt(t)) + 1e-12);
  }
  CHECK(two_point_measure(1.0).decay(50.0) == 1.0);
}

TEST_CASE("discretize merges equal shifts") {
  GridIndicator shape(2, 8.0, 8);
  auto m = discretize(circle_measure(1.0, 4), shape);
  CHECK(m.shifts.size() == 4);
  CHECK(m.max_residual_cells == 0.0);
  auto coarse = discretize(circle_measure(1.0, 720), shape);
  double total = 0.0;
  for (const auto& s : coarse.shifts) total += s.weight;
  CHECK(total == doctest::Approx(1.0));
  CHECK(coarse.max_residual_cells <= 0.5);
  CHECK_THROWS_AS(discretize(circle_measure(5.0, 8), shape), PreconditionError);
  CHECK_THROWS_AS(discretize(two_point_measure(1.0), shape), PreconditionError);
}

TEST_CASE("I_sigma of a 3x3 square against the unit circle") {
  // Averaging the overlap (3 - |cos|)(3 - |sin|) over directions gives 9 - 11/pi.
  const double exact = 9.0 - 11.0 / kPi;
  GridIndicator a(2, 8.0, 256);
  for (int x = 0; x < 96; ++x)
    for (int y = 0; y < 96; ++y) a.set(x, y);
  auto v = i_sigma(a, circle_measure(1.0, 720));
  CHECK(std::fabs(v.value - exact) <= v.error_bound);
  CHECK(std::fabs(v.value - exact) < 5e-3);
  CHECK(v.atoms == 720);
  CHECK(v.k == 256);
}

TEST_CASE("strict mode rejects coarse rounding") {
  GridIndicator a(2, 8.0, 64);
  a.set(0, 0);
  SaturationOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(i_sigma(a, circle_measure(1.0, 720), strict), PreconditionError);
  CHECK_NOTHROW(i_sigma(a, circle_measure(1.0, 4), strict));
  CHECK(i_sigma(a, circle_measure(1.0, 4), strict).error_bound == 0.0);
}

TEST_CASE("I_or on a hand example") {
  GridIndicator a(1, 8.0, 8);
  for (int i = 0; i < 3; ++i) a.set(i);
  auto v = i_or(a, two_point_measure(1.0), two_point_measure(2.0));
  CHECK(v.value == 0.5);
  CHECK(v.error_bound == 0.0);
  // With both factors equal, I_or reduces to sum_c A(c) n(c)^2 <= I_sigma.
  auto same = i_or(a, two_point_measure(1.0), two_point_measure(1.0));
  CHECK(same.value <= i_sigma(a, two_point_measure(1.0)).value);
}

TEST_CASE("I_sigma of a two-point measure counts pairs") {
  GridIndicator a(1, 8.0, 8);
  a.set(0);
  a.set(1);
  a.set(5);
  // pairs at distance 1: (0,1) both ways; each contributes weight 1/2
  CHECK(i_sigma(a, two_point_measure(1.0)).value == 1.0);
  CHECK(i_sigma(a, two_point_measure(3.0)).value == 1.0);
  CHECK(i_sigma(a, two_point_measure(2.0)).value == 0.0);
}

TEST_CASE("smoothing weights are the cell averages of the triangle kernel") {
  auto w1 = smoothing_weights(1);
  REQUIRE(w1.size() == 3);
  CHECK(w1[0] == doctest::Approx(0.125));
  CHECK(w1[1] == doctest::Approx(0.75));
  CHECK(w1[2] == doctest::Approx(0.125));
  for (int w = 1; w <= 9; ++w) {
    auto weights = smoothing_weights(w);
    double total = 0.0;
    for (double x : weights) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0));
  }
  std::vector<double> ones(64, 1.0);
  for (double x : smooth_cells(ones, 2, 8, 3)) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("c1 dominates 1 - Qhat") {
  Rng rng(11);
  for (int dim = 1; dim <= 2; ++dim) {
    for (int i = 0; i < 2000; ++i) {
      const double delta = 0.01 + rng.uniform();
      double q = 1.0;
      double norm2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double xi = 20.0 * (rng.uniform() - 0.5);
        const double u = kPi * delta * xi;
        q *= u == 0.0 ? 1.0 : std::sin(u) / u;
        norm2 += xi * xi;
      }
      // pi^2 / 6 is already enough; the documented constant is larger.
      CHECK(1.0 - q <= kPi * kPi / 6 * delta * delta * norm2 + 1e-12);
      CHECK(kPi * kPi / 6 <= c1_constant(dim));
    }
  }
}

TEST_CASE("convolution gap shrinks with the window") {
  auto sigma = circle_measure(1.0, 720);
  auto f = disc(8.0, 64, 4.0, 4.0, 2.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {1.0, 0.5, 0.25, 0.125}) {
    auto gap = convlem_gap(f, f, sigma, delta, 1.0 / std::sqrt(delta));
    CHECK(gap.holds());
    CHECK(gap.lhs < previous);
    previous = gap.lhs;
  }
  CHECK_THROWS_AS(convlem_gap(f, f, sigma, 0.1, 1.0), PreconditionError);
  CHECK_THROWS_AS(convlem_gap(f, f, sigma, 0.25, 0.0), PreconditionError);
}

TEST_CASE("zooming-out inequality on a disc") {
  auto sigma = circle_measure(1.0, 720);
  auto a = disc(8.0, 64, 4.0, 4.0, 2.5);
  auto z = zoomingout_inequality(a, sigma, 0.25, 0.5);
  CHECK(z.holds());
  CHECK(z.t == doctest::Approx(2.0));
  CHECK(z.i_zoomed > 0.0);
}

TEST_CASE("avoiding rasters have zero saturation") {
  auto r = avoiding_battery(5, 6);
  CHECK(r.trials == 6);
  CHECK(r.failures == 0);
  CHECK(r.worst == 0.0);
}

TEST_CASE("saturation property battery") {
  auto b = property_battery(17, 6);
  CHECK(b.failures() == 0);
  CHECK(b.to_json()["failures"] == 0);
  CHECK(b.convlem.worst <= 1.0);
}

TEST_CASE("battery is independent of thread count") {
  auto one = convlem_battery(3, 6, 1);
  auto four = convlem_battery(3, 6, 4);
  CHECK(one.worst == four.worst);
  CHECK(one.failures == four.failures);
}
