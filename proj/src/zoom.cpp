#include "avoid/zoom.hpp"

#include <algorithm>
#include <cmath>

#include "avoid/support.hpp"

namespace avoid::zoom {

namespace {

int lower_reach(int w) { return (w - 1) / 2; }
int upper_reach(int w) { return w - 1 - (w - 1) / 2; }

// Window sums of a k-periodic sequence over offsets [-lo, hi].
std::vector<std::int64_t> cyclic_window(const std::vector<std::int64_t>& values, int w) {
  const auto k = static_cast<std::int64_t>(values.size());
  std::vector<std::int64_t> prefix(values.size() + 1, 0);
  for (std::size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] + values[i];
  const std::int64_t total = prefix.back();
  // Sum over [0, j) of the periodic extension, for any integer j.
  auto cumulative = [&](std::int64_t j) {
    std::int64_t q = j / k;
    std::int64_t r = j % k;
    if (r < 0) {
      r += k;
      --q;
    }
    return q * total + prefix[static_cast<std::size_t>(r)];
  };
  const int lo = lower_reach(w);
  const int hi = upper_reach(w);
  std::vector<std::int64_t> out(values.size());
  for (std::int64_t x = 0; x < k; ++x)
    out[static_cast<std::size_t>(x)] = cumulative(x + hi + 1) - cumulative(x - lo);
  return out;
}

Rational integer_power(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_eps(const Rational& eps) {
  if (eps <= 0 || eps > 1) throw PreconditionError("eps must lie in (0, 1]");
}

}  // namespace

int window_cells(const GridIndicator& a, double delta) {
  if (!(delta > 0) || !std::isfinite(delta)) throw PreconditionError("delta must be > 0");
  const double cells = delta * a.resolution() / a.period();
  if (cells < 1.0 - 1e-9)
    throw PreconditionError("delta is smaller than one cell (" + std::to_string(cells) +
                            " cells)");
  return static_cast<int>(std::llround(cells));
}

std::vector<std::int64_t> window_counts(const GridIndicator& a, int w) {
  if (w < 1) throw PreconditionError("window must cover at least one cell");
  const int k = a.resolution();
  const auto ku = static_cast<std::size_t>(k);
  if (a.dim() == 1) {
    std::vector<std::int64_t> v(a.cells().begin(), a.cells().end());
    return cyclic_window(v, w);
  }
  std::vector<std::int64_t> rows(a.cell_count());
  std::vector<std::int64_t> line(ku);
  for (std::size_t y = 0; y < ku; ++y) {
    for (std::size_t x = 0; x < ku; ++x) line[x] = a.cells()[x + ku * y];
    auto s = cyclic_window(line, w);
    std::copy(s.begin(), s.end(), rows.begin() + static_cast<std::ptrdiff_t>(ku * y));
  }
  std::vector<std::int64_t> out(a.cell_count());
  for (std::size_t x = 0; x < ku; ++x) {
    for (std::size_t y = 0; y < ku; ++y) line[y] = rows[x + ku * y];
    auto s = cyclic_window(line, w);
    for (std::size_t y = 0; y < ku; ++y) out[x + ku * y] = s[y];
  }
  return out;
}

GridIndicator zoom_out_cells(const GridIndicator& a, int w, const Rational& eps) {
  check_eps(eps);
  const auto counts = window_counts(a, w);
  // count > eps w^d  <=>  count * den > num * w^d
  const Rational bound = eps * integer_power(Rational(w), a.dim());
  const BigInt num = boost::multiprecision::numerator(bound);
  const BigInt den = boost::multiprecision::denominator(bound);
  GridIndicator out(a.dim(), a.period(), a.resolution());
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (BigInt(counts[i]) * den > num) out.set(i);
  return out;
}

GridIndicator zoom_out(const GridIndicator& a, const ZoomParams& p) {
  return zoom_out_cells(a, window_cells(a, p.delta), exact(p.eps));
}

GridIndicator dilate(const GridIndicator& a, int radius) {
  if (radius < 0) throw PreconditionError("dilation radius must be >= 0");
  GridIndicator out(a.dim(), a.period(), a.resolution());
  // Separable: a box dilation is a 1-D dilation along each axis in turn.
  const int k = a.resolution();
  const int r = std::min(radius, k);
  GridIndicator along_x(a.dim(), a.period(), k);
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    if (!a.at(i)) continue;
    auto [x, y] = a.coords(i);
    for (int u = -r; u <= r; ++u) along_x.set(along_x.index(x + u, y));
  }
  if (a.dim() == 1) return along_x;
  for (std::size_t i = 0; i < along_x.cell_count(); ++i) {
    if (!along_x.at(i)) continue;
    auto [x, y] = along_x.coords(i);
    for (int v = -r; v <= r; ++v) out.set(out.index(x, y + v));
  }
  return out;
}

bool check_zm_a_cells(const GridIndicator& a, int w, const Rational& eps, int big_w) {
  if (w < 1 || big_w < w) throw PreconditionError("need 1 <= w <= W");
  check_eps(eps);
  const auto left = dilate(zoom_out_cells(a, w, eps), (big_w - w) / 2);
  const Rational scaled = eps * integer_power(Rational(w, big_w), a.dim());
  return left.subset_of(zoom_out_cells(a, big_w, scaled));
}

bool check_zm_a(const GridIndicator& a, const ZoomParams& p, double t) {
  if (!(t >= 1.0) || !std::isfinite(t)) throw PreconditionError("t must be >= 1");
  const int w = window_cells(a, p.delta);
  const double tw = t * w;
  const double rounded = std::round(tw);
  if (std::fabs(tw - rounded) > 1e-9 * std::max(1.0, tw))
    throw PreconditionError("t * delta is not a whole number of cells (" + std::to_string(tw) +
                            ")");
  return check_zm_a_cells(a, w, exact(p.eps), static_cast<int>(rounded));
}

bool check_zm_b_cells(const GridIndicator& a, int w1, const Rational& eps1, int w2,
                      const Rational& eps2) {
  if (w1 < 1 || w2 < 1) throw PreconditionError("windows must cover at least one cell");
  check_eps(eps1);
  check_eps(eps2);
  const int d = a.dim();
  const auto left = zoom_out_cells(zoom_out_cells(a, w2, eps2), w1, eps1);
  const Rational combined = eps1 * eps2 * integer_power(Rational(w1) * w2, d) /
                            integer_power(Rational(w1 + w2) * std::min(w1, w2), d);
  return left.subset_of(zoom_out_cells(a, w1 + w2, combined));
}

bool check_zm_b(const GridIndicator& a, const ZoomParams& p1, const ZoomParams& p2) {
  return check_zm_b_cells(a, window_cells(a, p1.delta), exact(p1.eps),
                          window_cells(a, p2.delta), exact(p2.eps));
}

BatteryReport property_battery(std::uint64_t seed, int cases, int threads) {
  if (cases < 0) throw PreconditionError("case count must be >= 0");
  struct Outcome {
    bool a = true, b = true, antitone = true, monotone = true, translation = true;
  };
  const auto total = static_cast<std::size_t>(cases) * 2;
  std::vector<Outcome> outcomes(total);
  parallel_for(total, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const int dim = i < static_cast<std::size_t>(cases) ? 1 : 2;
    const int k = static_cast<int>(rng.between(4, 64));
    const double fill = 0.05 + 0.9 * rng.uniform();
    GridIndicator g(dim, 1.0, k);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      if (rng.bernoulli(fill)) g.set(c);
    auto random_eps = [&] { return Rational(static_cast<std::int64_t>(rng.between(1, 20)), 20); };
    Outcome& out = outcomes[i];

    const int w = static_cast<int>(rng.between(1, std::max(1, k / 4)));
    const int big_w = static_cast<int>(rng.between(w, 4 * w));
    const Rational eps = random_eps();
    out.a = check_zm_a_cells(g, w, eps, big_w);

    const int w1 = static_cast<int>(rng.between(1, std::max(1, k / 4)));
    const int w2 = static_cast<int>(rng.between(1, std::max(1, k / 4)));
    out.b = check_zm_b_cells(g, w1, random_eps(), w2, random_eps());

    const Rational e1 = random_eps();
    const Rational e2 = random_eps();
    const auto& lo = std::min(e1, e2);
    const auto& hi = std::max(e1, e2);
    out.antitone = zoom_out_cells(g, w, hi).subset_of(zoom_out_cells(g, w, lo));

    GridIndicator bigger = g;
    for (std::size_t c = 0; c < bigger.cell_count(); ++c)
      if (rng.bernoulli(0.2)) bigger.set(c);
    out.monotone = zoom_out_cells(g, w, eps).subset_of(zoom_out_cells(bigger, w, eps));

    const auto dx = rng.between(-k, k);
    const auto dy = dim == 2 ? rng.between(-k, k) : 0;
    out.translation = zoom_out_cells(g.shifted(dx, dy), w, eps) ==
                      zoom_out_cells(g, w, eps).shifted(dx, dy);
  });
  BatteryReport report;
  report.cases = static_cast<int>(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto& o = outcomes[i];
    const bool all = o.a && o.b && o.antitone && o.monotone && o.translation;
    (i < static_cast<std::size_t>(cases) ? report.passed_dim1 : report.passed_dim2) += all;
    report.lemma_a_failures += !o.a;
    report.lemma_b_failures += !o.b;
    report.antitone_failures += !o.antitone;
    report.monotone_failures += !o.monotone;
    report.translation_failures += !o.translation;
  }
  return report;
}

}  // namespace avoid::zoom
