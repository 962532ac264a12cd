#include "avoid/saturation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "avoid/support.hpp"
#include "avoid/zoom.hpp"

namespace avoid::saturation {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> as_values(const GridIndicator& a) {
  return std::vector<double>(a.cells().begin(), a.cells().end());
}

double cell_volume(const GridIndicator& shape) {
  return std::pow(shape.cell_width(), shape.dim());
}

int whole_cells(const GridIndicator& shape, double delta) {
  if (!(delta > 0) || !std::isfinite(delta)) throw PreconditionError("delta must be > 0");
  const double cells = delta * shape.resolution() / shape.period();
  const double w = std::round(cells);
  if (w < 1 || std::fabs(cells - w) > 1e-9 * std::max(1.0, cells))
    throw PreconditionError("delta must be a whole number (>= 1) of cells, got " +
                            std::to_string(cells));
  return static_cast<int>(w);
}

void check_fits(const AdmissibleMeasure& sigma, const GridIndicator& shape) {
  if (sigma.dim() != shape.dim()) throw PreconditionError("measure and raster dimensions differ");
  if (!(sigma.support_radius_max() < shape.period() / 2))
    throw PreconditionError("measure support must stay below half the period");
}

// #{c : A(c) != A(c + e_axis)}: cell faces on the boundary of A, per axis.
std::array<std::int64_t, 2> boundary_faces(const GridIndicator& a) {
  std::array<std::int64_t, 2> faces{0, 0};
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    auto [x, y] = a.coords(i);
    faces[0] += a.at(i) != a.at(a.index(x + 1, y));
    if (a.dim() == 2) faces[1] += a.at(i) != a.at(a.index(x, y + 1));
  }
  return faces;
}

double rounding_error(const GridIndicator& a, const AdmissibleMeasure& sigma,
                      const CellMeasure& m) {
  // |A n (A - y)| and |A n (A - s)| differ by at most |A delta (A + y - s)|,
  // which sweeping each boundary face by the residual bounds.
  const auto faces = boundary_faces(a);
  const double face_area = std::pow(a.cell_width(), a.dim() - 1);
  double err = 0.0;
  for (std::size_t j = 0; j < sigma.atoms().size(); ++j) {
    const auto& r = m.residuals[j];
    err += sigma.atoms()[j].weight *
           (r[0] * static_cast<double>(faces[0]) + r[1] * static_cast<double>(faces[1])) *
           face_area;
  }
  return err;
}

void check_strict(const CellMeasure& m, const SaturationOptions& options) {
  if (options.strict && m.max_residual_cells > options.max_residual_cells)
    throw PreconditionError("atom rounding residual " + std::to_string(m.max_residual_cells) +
                            " cells exceeds the strict limit " +
                            std::to_string(options.max_residual_cells));
}

// n(c) = sum_s w_s A(c + s) for every cell.
std::vector<double> neighbor_mass(const GridIndicator& a, const CellMeasure& m) {
  std::vector<double> n(a.cell_count(), 0.0);
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    auto [x, y] = a.coords(i);
    double total = 0.0;
    for (const auto& s : m.shifts)
      if (a.at(a.index(x + s.dx, y + s.dy))) total += s.weight;
    n[i] = total;
  }
  return n;
}

double triangle_cdf(double t) {
  if (t <= -1) return 0.0;
  if (t <= 0) return (t + 1) * (t + 1) / 2;
  if (t <= 1) return 1 - (1 - t) * (1 - t) / 2;
  return 1.0;
}

// Greedy D-avoiding subset of a random candidate set, certified by construction.
GridIndicator random_avoiding(Rng& rng, const ForbiddenOffsets& table, int dim, double period,
                              int k, double fill) {
  GridIndicator g(dim, period, k);
  std::vector<std::size_t> order(g.cell_count());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (auto c : order) {
    if (!rng.bernoulli(fill)) continue;
    auto [x, y] = g.coords(c);
    bool ok = true;
    for (const auto& [dx, dy] : table.list()) {
      if (g.at(g.index(x + dx, y + dy)) || g.at(g.index(x - dx, y - dy)) ||
          (dx == 0 && dy == 0)) {
        ok = false;
        break;
      }
    }
    if (ok) g.set(c);
  }
  return g;
}

GridIndicator random_raster(Rng& rng, int dim, double period, int k, double fill) {
  GridIndicator g(dim, period, k);
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    if (rng.bernoulli(fill)) g.set(i);
  return g;
}

constexpr double kBatteryPeriod = 8.0;
constexpr int kBatteryResolution = 64;

const AdmissibleMeasure& battery_measure() {
  static const AdmissibleMeasure sigma = circle_measure(1.0, 720);
  return sigma;
}

template <typename Trial>
BatteryResult run_battery(int trials, int threads, Trial trial) {
  if (trials < 0) throw PreconditionError("trial count must be >= 0");
  std::vector<std::pair<bool, double>> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = trial(i); });
  BatteryResult r;
  r.trials = trials;
  r.worst = -std::numeric_limits<double>::infinity();
  for (const auto& [ok, score] : out) {
    r.failures += !ok;
    r.worst = std::max(r.worst, score);
  }
  if (trials == 0) r.worst = 0.0;
  return r;
}

}  // namespace

// ------------------------------------------------------------- measures

AdmissibleMeasure::AdmissibleMeasure(int dim, std::vector<Atom> atoms, Kind kind, double radius)
    : dim_(dim), atoms_(std::move(atoms)), kind_(kind), radius_(radius) {
  if (dim != 1 && dim != 2) throw PreconditionError("measures live in dim 1 or 2");
  if (atoms_.empty()) throw PreconditionError("measure has no atoms");
  double total = 0.0;
  r_min_ = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) {
    if (!(a.weight >= 0)) throw PreconditionError("atom weights must be >= 0");
    if (dim == 1 && a.y != 0.0) throw PreconditionError("1-D atoms must have y = 0");
    total += a.weight;
    const double r = std::hypot(a.x, a.y);
    r_min_ = std::min(r_min_, r);
    r_max_ = std::max(r_max_, r);
  }
  if (std::fabs(total - 1.0) > std::ldexp(1.0, -40))
    throw PreconditionError("atom weights must sum to 1");
  if (!(r_min_ > 0)) throw PreconditionError("measure must keep away from the origin");
  for (const auto& a : atoms_) {
    const bool mirrored = std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& b) {
      return b.x == -a.x && b.y == -a.y && b.weight == a.weight;
    });
    if (!mirrored) throw PreconditionError("measure is not symmetric");
  }
}

double AdmissibleMeasure::transform(double xi, double eta) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * std::cos(2 * kPi * (a.x * xi + a.y * eta));
  return s;
}

double AdmissibleMeasure::continuous_transform(double radial) const {
  if (kind_ == Kind::circle) return std::cyl_bessel_j(0.0, 2 * kPi * radius_ * std::fabs(radial));
  return std::cos(2 * kPi * radius_ * radial);
}

double AdmissibleMeasure::decay(double t) const {
  if (!(t >= 0)) throw PreconditionError("decay threshold must be >= 0");
  if (kind_ == Kind::two_point) return 1.0;
  return bessel_j0_tail_sup(2 * kPi * radius_ * t);
}

std::string AdmissibleMeasure::describe() const {
  std::string r = std::to_string(radius_);
  if (kind_ == Kind::circle) return "circle:" + r + ":" + std::to_string(atoms_.size());
  return "two-point:" + r;
}

AdmissibleMeasure circle_measure(double radius, int n_atoms) {
  if (!(radius > 0)) throw PreconditionError("circle radius must be > 0");
  if (n_atoms < 4 || n_atoms % 2 != 0)
    throw PreconditionError("circle measure needs an even atom count >= 4");
  std::vector<Atom> atoms(static_cast<std::size_t>(n_atoms));
  const double w = 1.0 / n_atoms;
  const int half = n_atoms / 2;
  for (int j = 0; j < half; ++j) {
    const double angle = 2 * kPi * j / n_atoms;
    double x = radius * std::cos(angle);
    double y = radius * std::sin(angle);
    // Exact axis values keep quarter-turn atoms on the lattice.
    if (4 * j == n_atoms) x = 0.0;
    if (j == 0) y = 0.0;
    atoms[static_cast<std::size_t>(j)] = {x, y, w};
    atoms[static_cast<std::size_t>(j + half)] = {-x, -y, w};
  }
  return AdmissibleMeasure(2, std::move(atoms), AdmissibleMeasure::Kind::circle, radius);
}

AdmissibleMeasure two_point_measure(double radius) {
  if (!(radius > 0)) throw PreconditionError("radius must be > 0");
  return AdmissibleMeasure(1, {{radius, 0.0, 0.5}, {-radius, 0.0, 0.5}},
                           AdmissibleMeasure::Kind::two_point, radius);
}

AdmissibleMeasure parse_measure(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = spec.find(':', start);
    parts.emplace_back(spec.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  auto number = [&](const std::string& s) {
    return to_double(parse_rational(s));
  };
  if (parts[0] == "circle" && parts.size() == 3) {
    const double atoms = number(parts[2]);
    if (atoms != std::floor(atoms) || atoms > 1e7) throw ParseError("atom count must be an integer");
    return circle_measure(number(parts[1]), static_cast<int>(atoms));
  }
  if (parts[0] == "two-point" && parts.size() == 2) return two_point_measure(number(parts[1]));
  throw ParseError("unknown measure '" + std::string(spec) +
                   "' (expected circle:<radius>:<atoms> or two-point:<radius>)");
}

double bessel_j0_tail_sup(double x) {
  if (x <= 0) return 1.0;
  auto j1 = [](double v) { return std::cyl_bessel_j(1.0, v); };
  // First zero of J1 after x; consecutive zeros are about pi apart.
  double lo = x;
  double hi = x;
  const double step = 0.25;
  double f_lo = j1(lo);
  while (true) {
    hi = lo + step;
    const double f_hi = j1(hi);
    if (f_lo == 0.0 || (f_lo < 0) != (f_hi < 0)) break;
    lo = hi;
    f_lo = f_hi;
  }
  if (f_lo != 0.0) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((j1(mid) < 0) == (f_lo < 0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  const double extremum = std::fabs(std::cyl_bessel_j(0.0, 0.5 * (lo + hi)));
  return std::max(std::fabs(std::cyl_bessel_j(0.0, x)), extremum);
}

// ------------------------------------------------------------- discretize

CellMeasure discretize(const AdmissibleMeasure& sigma, const GridIndicator& shape) {
  check_fits(sigma, shape);
  const double per_cell = shape.resolution() / shape.period();
  const double h = shape.cell_width();
  CellMeasure m;
  std::map<std::pair<int, int>, double> merged;
  for (const auto& a : sigma.atoms()) {
    const double sx = a.x * per_cell;
    const double sy = a.y * per_cell;
    const auto dx = static_cast<int>(std::llround(sx));
    const auto dy = static_cast<int>(std::llround(sy));
    const double rx = std::fabs(sx - dx);
    const double ry = std::fabs(sy - dy);
    m.max_residual_cells = std::max({m.max_residual_cells, rx, ry});
    m.residuals.push_back({rx * h, ry * h});
    merged[{dx, dy}] += a.weight;
  }
  for (const auto& [key, w] : merged) m.shifts.push_back({key.first, key.second, w});
  return m;
}

nlohmann::json SaturationValue::to_json() const {
  return {{"value", value},
          {"error_bound", error_bound},
          {"k", k},
          {"period", period},
          {"atoms", atoms},
          {"max_residual_cells", max_residual_cells}};
}

std::vector<std::int64_t> pair_counts(const GridIndicator& a, const CellMeasure& m) {
  std::vector<std::size_t> occupied;
  for (std::size_t i = 0; i < a.cell_count(); ++i)
    if (a.at(i)) occupied.push_back(i);
  std::vector<std::int64_t> counts;
  counts.reserve(m.shifts.size());
  for (const auto& s : m.shifts) {
    std::int64_t c = 0;
    for (auto i : occupied) {
      auto [x, y] = a.coords(i);
      c += a.at(a.index(x + s.dx, y + s.dy));
    }
    counts.push_back(c);
  }
  return counts;
}

SaturationValue i_sigma(const GridIndicator& a, const AdmissibleMeasure& sigma,
                        const SaturationOptions& options) {
  const auto m = discretize(sigma, a);
  check_strict(m, options);
  const auto counts = pair_counts(a, m);
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j)
    total += m.shifts[j].weight * static_cast<double>(counts[j]);
  SaturationValue v;
  v.value = total * cell_volume(a);
  v.error_bound = rounding_error(a, sigma, m);
  v.k = a.resolution();
  v.period = a.period();
  v.atoms = sigma.atoms().size();
  v.max_residual_cells = m.max_residual_cells;
  return v;
}

SaturationValue i_or(const GridIndicator& a, const AdmissibleMeasure& s1,
                     const AdmissibleMeasure& s2, const SaturationOptions& options) {
  const auto m1 = discretize(s1, a);
  const auto m2 = discretize(s2, a);
  check_strict(m1, options);
  check_strict(m2, options);
  const auto n1 = neighbor_mass(a, m1);
  const auto n2 = neighbor_mass(a, m2);
  double total = 0.0;
  for (std::size_t i = 0; i < a.cell_count(); ++i)
    if (a.at(i)) total += n1[i] * n2[i];
  SaturationValue v;
  v.value = total * cell_volume(a);
  // Each factor lies in [0, 1], so the two rounding errors add.
  v.error_bound = rounding_error(a, s1, m1) + rounding_error(a, s2, m2);
  v.k = a.resolution();
  v.period = a.period();
  v.atoms = s1.atoms().size() + s2.atoms().size();
  v.max_residual_cells = std::max(m1.max_residual_cells, m2.max_residual_cells);
  return v;
}

// ------------------------------------------------------------- smoothing

double c1_constant(int dim) {
  // 1 - prod sinc(pi delta xi_i) <= sum (pi delta xi_i)^2 / 6, so pi^2/6 already
  // suffices; dim pi^2 / 3 keeps a safety factor of 2 dim.
  return dim * kPi * kPi / 3.0;
}

std::vector<double> smoothing_weights(int w) {
  if (w < 1) throw PreconditionError("window must cover at least one cell");
  const int reach = (w + 1) / 2;
  std::vector<double> weights(static_cast<std::size_t>(2 * reach + 1));
  const double half = w / 2.0;
  for (int m = -reach; m <= reach; ++m)
    weights[static_cast<std::size_t>(m + reach)] =
        (triangle_cdf(half - m) - triangle_cdf(-half - m)) / w;
  return weights;
}

std::vector<double> smooth_cells(const std::vector<double>& g, int dim, int k, int w) {
  const auto weights = smoothing_weights(w);
  const int reach = (static_cast<int>(weights.size()) - 1) / 2;
  const auto ku = static_cast<std::size_t>(k);
  auto wrap = [k](int v) { return static_cast<std::size_t>(((v % k) + k) % k); };
  std::vector<double> along_x(g.size(), 0.0);
  const std::size_t rows = dim == 2 ? ku : 1;
  for (std::size_t y = 0; y < rows; ++y)
    for (int x = 0; x < k; ++x) {
      double s = 0.0;
      for (int m = -reach; m <= reach; ++m)
        s += weights[static_cast<std::size_t>(m + reach)] * g[wrap(x + m) + ku * y];
      along_x[static_cast<std::size_t>(x) + ku * y] = s;
    }
  if (dim == 1) return along_x;
  std::vector<double> out(g.size(), 0.0);
  for (int y = 0; y < k; ++y)
    for (std::size_t x = 0; x < ku; ++x) {
      double s = 0.0;
      for (int m = -reach; m <= reach; ++m)
        s += weights[static_cast<std::size_t>(m + reach)] * along_x[x + ku * wrap(y + m)];
      out[x + ku * static_cast<std::size_t>(y)] = s;
    }
  return out;
}

double pair_integral(const std::vector<double>& f, const std::vector<double>& g,
                     const GridIndicator& shape, const CellMeasure& m) {
  if (f.size() != shape.cell_count() || g.size() != shape.cell_count())
    throw PreconditionError("field size does not match raster");
  double total = 0.0;
  for (const auto& s : m.shifts) {
    double inner = 0.0;
    for (std::size_t i = 0; i < shape.cell_count(); ++i) {
      if (f[i] == 0.0) continue;
      auto [x, y] = shape.coords(i);
      inner += f[i] * g[shape.index(x + s.dx, y + s.dy)];
    }
    total += s.weight * inner;
  }
  return total * cell_volume(shape);
}

ConvGap convlem_gap(const GridIndicator& f, const GridIndicator& g,
                    const AdmissibleMeasure& sigma, double delta, double t) {
  if (f.dim() != g.dim() || f.resolution() != g.resolution() || f.period() != g.period())
    throw PreconditionError("f and g must share a raster shape");
  if (!(t > 0) || !std::isfinite(t)) throw PreconditionError("T must be > 0");
  const int w = whole_cells(f, delta);
  const auto m = discretize(sigma, f);
  const auto fv = as_values(f);
  const auto gv = as_values(g);
  const auto smoothed = smooth_cells(gv, f.dim(), f.resolution(), w);
  ConvGap gap;
  gap.lhs = std::fabs(pair_integral(fv, gv, f, m) - pair_integral(fv, smoothed, f, m));
  const double vol = cell_volume(f);
  const double norm_f = std::sqrt(vol * static_cast<double>(f.occupied_count()));
  const double norm_g = std::sqrt(vol * static_cast<double>(g.occupied_count()));
  gap.c1 = c1_constant(f.dim());
  gap.decay = sigma.decay(t);
  gap.rhs = (gap.c1 * delta * delta * t * t + 2 * gap.decay) * norm_f * norm_g;
  return gap;
}

ZoomingOut zoomingout_inequality(const GridIndicator& a, const AdmissibleMeasure& sigma,
                                 double delta, double eps) {
  const int w = whole_cells(a, delta);
  ZoomingOut z;
  z.t = 1.0 / std::sqrt(delta);
  z.decay = sigma.decay(z.t);
  z.i_a = i_sigma(a, sigma).value;
  z.i_zoomed = i_sigma(zoom::zoom_out_cells(a, w, exact(eps)), sigma).value;
  const double err = c1_constant(a.dim()) * delta * delta * z.t * z.t + 2 * z.decay;
  z.bound = eps * eps * z.i_zoomed - 2 * err * std::pow(a.period(), a.dim());
  return z;
}

// ------------------------------------------------------------- batteries

BatteryResult avoiding_battery(std::uint64_t seed, int trials, int threads) {
  const auto& sigma = battery_measure();
  const ForbiddenOffsets table(DistanceSet::integers({1}), 2, exact(kBatteryPeriod),
                               kBatteryResolution, SlackMode::conservative);
  return run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const double fill = 0.02 + 0.5 * rng.uniform();
    auto g = random_avoiding(rng, table, 2, kBatteryPeriod, kBatteryResolution, fill);
    const double v = i_sigma(g, sigma).value;
    return std::pair{certify_avoiding(g, DistanceSet::integers({1})) && v == 0.0, v};
  });
}

BatteryResult superadditivity_battery(std::uint64_t seed, int trials, int threads) {
  const auto& sigma = battery_measure();
  return run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const int k = kBatteryResolution;
    // Two vertical bands, each 22 cells wide, 10 cells apart both ways round the
    // torus; the measure reaches at most 8.5 cells.
    GridIndicator a1(2, kBatteryPeriod, k), a2(2, kBatteryPeriod, k);
    const double p1 = 0.05 + 0.9 * rng.uniform();
    const double p2 = 0.05 + 0.9 * rng.uniform();
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < 22; ++x) {
        if (rng.bernoulli(p1)) a1.set(x, y);
        if (rng.bernoulli(p2)) a2.set(x + 32, y);
      }
    const auto m = discretize(sigma, a1);
    const auto c1 = pair_counts(a1, m);
    const auto c2 = pair_counts(a2, m);
    const auto both = pair_counts(a1.united(a2), m);
    bool ok = true;
    for (std::size_t j = 0; j < both.size(); ++j) ok = ok && both[j] == c1[j] + c2[j];
    const double gap = i_sigma(a1.united(a2), sigma).value - i_sigma(a1, sigma).value -
                       i_sigma(a2, sigma).value;
    return std::pair{ok, std::fabs(gap)};
  });
}

BatteryResult zoomingout_battery(std::uint64_t seed, int trials, int threads) {
  const auto& sigma = battery_measure();
  static constexpr int kDeltas[] = {1, 2, 4};
  static constexpr double kEps[] = {0.3, 0.5, 0.8};
  return run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const double fill = 0.05 + 0.9 * rng.uniform();
    auto a = random_raster(rng, 2, kBatteryPeriod, kBatteryResolution, fill);
    const double delta = kDeltas[i % 3] * kBatteryPeriod / kBatteryResolution;
    const auto z = zoomingout_inequality(a, sigma, delta, kEps[(i / 3) % 3]);
    return std::pair{z.holds(), z.bound - z.i_a};
  });
}

BatteryResult convlem_battery(std::uint64_t seed, int trials, int threads) {
  const auto& sigma = battery_measure();
  static constexpr int kDeltas[] = {1, 2, 4};
  return run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    auto f = random_raster(rng, 2, kBatteryPeriod, kBatteryResolution, 0.05 + 0.9 * rng.uniform());
    auto g = random_raster(rng, 2, kBatteryPeriod, kBatteryResolution, 0.05 + 0.9 * rng.uniform());
    const double delta = kDeltas[i % 3] * kBatteryPeriod / kBatteryResolution;
    // T spans a factor of 4 around delta^-1/2
    const double t = std::pow(2.0, 2 * rng.uniform() - 1) / std::sqrt(delta);
    const auto gap = convlem_gap(f, g, sigma, delta, t);
    return std::pair{gap.holds(), gap.rhs > 0 ? gap.lhs / gap.rhs : 0.0};
  });
}

int SaturationBattery::failures() const {
  return avoiding_zero.failures + superadditivity.failures + monotone.failures +
         translation.failures + zooming_out.failures + convlem.failures;
}

nlohmann::json SaturationBattery::to_json() const {
  auto one = [](const BatteryResult& r) {
    return nlohmann::json{{"trials", r.trials}, {"failures", r.failures}, {"worst", r.worst}};
  };
  return {{"avoiding_zero", one(avoiding_zero)},     {"superadditivity", one(superadditivity)},
          {"monotone", one(monotone)},               {"translation", one(translation)},
          {"zooming_out", one(zooming_out)},         {"convlem", one(convlem)},
          {"failures", failures()}};
}

SaturationBattery property_battery(std::uint64_t seed, int trials, int threads) {
  SaturationBattery b;
  const auto& sigma = battery_measure();
  b.avoiding_zero = avoiding_battery(seed, trials, threads);
  b.superadditivity = superadditivity_battery(Rng::mix(seed, 1), trials, threads);
  b.monotone = run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(Rng::mix(seed, 2), i);
    auto a = random_raster(rng, 2, kBatteryPeriod, kBatteryResolution, 0.5 * rng.uniform());
    GridIndicator bigger = a;
    for (std::size_t c = 0; c < bigger.cell_count(); ++c)
      if (rng.bernoulli(0.2)) bigger.set(c);
    const auto m = discretize(sigma, a);
    const auto small = pair_counts(a, m);
    const auto large = pair_counts(bigger, m);
    bool ok = true;
    for (std::size_t j = 0; j < small.size(); ++j) ok = ok && small[j] <= large[j];
    return std::pair{ok, 0.0};
  });
  b.translation = run_battery(trials, threads, [&](std::size_t i) {
    Rng rng(Rng::mix(seed, 3), i);
    auto a = random_raster(rng, 2, kBatteryPeriod, kBatteryResolution, rng.uniform());
    const auto dx = rng.between(-kBatteryResolution, kBatteryResolution);
    const auto dy = rng.between(-kBatteryResolution, kBatteryResolution);
    const auto m = discretize(sigma, a);
    return std::pair{pair_counts(a, m) == pair_counts(a.shifted(dx, dy), m), 0.0};
  });
  b.zooming_out = zoomingout_battery(Rng::mix(seed, 4), trials, threads);
  b.convlem = convlem_battery(Rng::mix(seed, 5), trials, threads);
  return b;
}

}  // namespace avoid::saturation
