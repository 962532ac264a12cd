#include "avoid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace avoid {

// ---------------------------------------------------------------- DistanceSet

DistanceSet::DistanceSet(std::vector<Rational> values, DistanceMode mode)
    : values_(std::move(values)), mode_(mode) {
  if (values_.empty()) throw PreconditionError("distance set is empty");
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  if (values_.front() <= 0) throw PreconditionError("distances must be strictly positive");
  if (mode_ == DistanceMode::integer) {
    for (const auto& v : values_)
      if (boost::multiprecision::denominator(v) != 1)
        throw PreconditionError("integer-mode distance set has non-integer value " +
                                avoid::to_string(v));
  }
}

DistanceSet DistanceSet::integers(const std::vector<std::int64_t>& values) {
  std::vector<Rational> r(values.begin(), values.end());
  return DistanceSet(std::move(r), DistanceMode::integer);
}

DistanceSet DistanceSet::reals(const std::vector<double>& values) {
  std::vector<Rational> r;
  r.reserve(values.size());
  for (double v : values) r.push_back(exact(v));
  return DistanceSet(std::move(r), DistanceMode::real);
}

DistanceSet DistanceSet::parse(std::string_view text, DistanceMode mode) {
  std::vector<Rational> values;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    std::string_view field = text.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    if (field.find_first_not_of(" \t") == std::string_view::npos)
      throw ParseError("empty field in distance list '" + std::string(text) + "'");
    values.push_back(parse_rational(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return DistanceSet(std::move(values), mode);
}

std::vector<double> DistanceSet::values() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(to_double(v));
  return out;
}

std::vector<std::int64_t> DistanceSet::integer_values() const {
  std::vector<std::int64_t> out;
  out.reserve(values_.size());
  for (const auto& v : values_) {
    if (boost::multiprecision::denominator(v) != 1)
      throw PreconditionError("distance " + avoid::to_string(v) + " is not an integer");
    out.push_back(boost::multiprecision::numerator(v).convert_to<std::int64_t>());
  }
  return out;
}

DistanceSet DistanceSet::scaled(const Rational& factor) const {
  if (factor <= 0) throw PreconditionError("scale factor must be positive");
  std::vector<Rational> out;
  out.reserve(values_.size());
  bool all_integer = true;
  for (const auto& v : values_) {
    out.push_back(v * factor);
    all_integer = all_integer && boost::multiprecision::denominator(out.back()) == 1;
  }
  return DistanceSet(std::move(out), all_integer ? DistanceMode::integer : DistanceMode::real);
}

DistanceSet DistanceSet::united(const DistanceSet& other) const {
  std::vector<Rational> all = values_;
  all.insert(all.end(), other.values_.begin(), other.values_.end());
  const bool integer = mode_ == DistanceMode::integer && other.mode_ == DistanceMode::integer;
  return DistanceSet(std::move(all), integer ? DistanceMode::integer : DistanceMode::real);
}

std::string DistanceSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ',';
    out += avoid::to_string(values_[i]);
  }
  return out;
}

// -------------------------------------------------------------- GridIndicator

namespace {

void check_shape(int dim, double period, int resolution) {
  if (dim != 1 && dim != 2) throw PreconditionError("only dim 1 and 2 are supported");
  if (!(period > 0) || !std::isfinite(period)) throw PreconditionError("period must be > 0");
  if (resolution < 1) throw PreconditionError("resolution must be >= 1");
  if (dim == 2 && resolution > 46340) throw PreconditionError("resolution too large");
}

std::size_t cells_for(int dim, int k) {
  return dim == 1 ? static_cast<std::size_t>(k)
                  : static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
}

std::int64_t mod(std::int64_t a, std::int64_t k) {
  std::int64_t r = a % k;
  return r < 0 ? r + k : r;
}

}  // namespace

GridIndicator::GridIndicator(int dim, double period, int resolution)
    : dim_(dim), period_(period), k_(resolution) {
  check_shape(dim, period, resolution);
  cells_.assign(cells_for(dim, resolution), 0);
}

GridIndicator GridIndicator::full(int dim, double period, int resolution) {
  GridIndicator g(dim, period, resolution);
  std::fill(g.cells_.begin(), g.cells_.end(), 1);
  return g;
}

GridIndicator GridIndicator::from_cells(int dim, double period, int resolution,
                                        std::vector<std::uint8_t> cells) {
  GridIndicator g(dim, period, resolution);
  if (cells.size() != g.cells_.size())
    throw PreconditionError("cell array has length " + std::to_string(cells.size()) +
                            ", expected " + std::to_string(g.cells_.size()));
  for (auto& c : cells) c = c ? 1 : 0;
  g.cells_ = std::move(cells);
  return g;
}

std::size_t GridIndicator::index(std::int64_t x, std::int64_t y) const {
  const std::int64_t xi = mod(x, k_);
  if (dim_ == 1) return static_cast<std::size_t>(xi);
  return static_cast<std::size_t>(xi + static_cast<std::int64_t>(k_) * mod(y, k_));
}

std::array<int, 2> GridIndicator::coords(std::size_t index) const {
  if (dim_ == 1) return {static_cast<int>(index), 0};
  return {static_cast<int>(index % k_), static_cast<int>(index / k_)};
}

std::size_t GridIndicator::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

GridIndicator GridIndicator::shifted(std::int64_t dx, std::int64_t dy) const {
  GridIndicator out(dim_, period_, k_);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i]) continue;
    auto [x, y] = coords(i);
    out.cells_[out.index(x + dx, dim_ == 1 ? 0 : y + dy)] = 1;
  }
  return out;
}

GridIndicator GridIndicator::refined(int factor) const {
  if (factor < 1) throw PreconditionError("refinement factor must be >= 1");
  GridIndicator out(dim_, period_, k_ * factor);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i]) continue;
    auto [x, y] = coords(i);
    if (dim_ == 1) {
      for (int a = 0; a < factor; ++a) out.cells_[out.index(x * factor + a)] = 1;
    } else {
      for (int b = 0; b < factor; ++b)
        for (int a = 0; a < factor; ++a)
          out.cells_[out.index(x * factor + a, y * factor + b)] = 1;
    }
  }
  return out;
}

bool GridIndicator::subset_of(const GridIndicator& other) const {
  if (dim_ != other.dim_ || k_ != other.k_) throw PreconditionError("grid shape mismatch");
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i] && !other.cells_[i]) return false;
  return true;
}

GridIndicator GridIndicator::united(const GridIndicator& other) const {
  if (dim_ != other.dim_ || k_ != other.k_) throw PreconditionError("grid shape mismatch");
  GridIndicator out = *this;
  for (std::size_t i = 0; i < cells_.size(); ++i) out.cells_[i] |= other.cells_[i];
  return out;
}

double density(const GridIndicator& a) {
  return static_cast<double>(a.occupied_count()) / static_cast<double>(a.cell_count());
}

Fraction exact_density(const GridIndicator& a) {
  return Fraction(static_cast<std::int64_t>(a.occupied_count()),
                  static_cast<std::int64_t>(a.cell_count()));
}

// ------------------------------------------------------------------ BandTest

BandTest::BandTest(const DistanceSet& d, const Rational& period, int resolution, int dim,
                   SlackMode mode)
    : dim_(dim), mode_(mode) {
  if (resolution < 1) throw PreconditionError("resolution must be >= 1");
  if (period <= 0) throw PreconditionError("period must be > 0");
  const Rational cells_per_length = Rational(resolution) / period;
  double max_scaled = 0.0;
  for (const auto& v : d.exact_values()) {
    scaled_.push_back(v * cells_per_length);
    scaled_approx_.push_back(to_double(scaled_.back()));
    max_scaled = std::max(max_scaled, scaled_approx_.back());
  }
  tol_cells_ = std::ldexp(1.0, -40) * resolution;
  reach_ = max_scaled + std::sqrt(static_cast<double>(dim)) + tol_cells_ + 1.0;
}

bool BandTest::hits_exact(const BigInt& s_int, const Rational& a) const {
  // Decides |sqrt(s) - a| < sqrt(m) without square roots.
  const Rational s(s_int);
  const Rational m(dim_);
  // upper: sqrt(s) < a + sqrt(m)  <=>  s - a^2 - m < 2 a sqrt(m)
  const Rational y = s - a * a - m;
  const bool upper = y < 0 || y * y < 4 * a * a * m;
  if (!upper) return false;
  // lower: sqrt(s) + sqrt(m) > a  <=>  not (2 sqrt(sm) <= a^2 - s - m)
  const Rational x = a * a - s - m;
  const bool at_or_below = a >= 0 && x >= 0 && 4 * s * m <= x * x;
  return !at_or_below;
}

bool BandTest::hits(std::int64_t dx, std::int64_t dy) const {
  const std::int64_t s = dx * dx + (dim_ == 2 ? dy * dy : 0);
  const double norm = std::sqrt(static_cast<double>(s));
  const double half_width = std::sqrt(static_cast<double>(dim_));
  for (std::size_t i = 0; i < scaled_.size(); ++i) {
    const double gap = std::fabs(norm - scaled_approx_[i]);
    if (mode_ == SlackMode::exact_center) {
      if (gap <= tol_cells_) return true;
      continue;
    }
    if (gap < half_width - 1e-9) return true;
    if (gap > half_width + 1e-9) continue;
    if (hits_exact(BigInt(s), scaled_[i])) return true;
  }
  return false;
}

// ---------------------------------------------------------- ForbiddenOffsets

ForbiddenOffsets::ForbiddenOffsets(const DistanceSet& d, int dim, const Rational& period,
                                   int resolution, SlackMode mode)
    : dim_(dim), k_(resolution) {
  if (dim != 1 && dim != 2) throw PreconditionError("only dim 1 and 2 are supported");
  BandTest band(d, period, resolution, dim, mode);
  const double reach = band.reach();
  const std::int64_t k = resolution;
  auto reps = [&](std::int64_t a) {
    std::vector<std::int64_t> out;
    const auto lo = static_cast<std::int64_t>(std::ceil((-reach - static_cast<double>(a)) / k));
    const auto hi = static_cast<std::int64_t>(std::floor((reach - static_cast<double>(a)) / k));
    for (std::int64_t z = lo; z <= hi; ++z) out.push_back(a + k * z);
    return out;
  };
  const std::int64_t ky = dim == 2 ? k : 1;
  table_.assign(static_cast<std::size_t>(k * ky), 0);
  std::vector<std::vector<std::int64_t>> rep_cache(static_cast<std::size_t>(k));
  for (std::int64_t a = 0; a < k; ++a) rep_cache[static_cast<std::size_t>(a)] = reps(a);
  for (std::int64_t b = 0; b < ky; ++b) {
    const std::vector<std::int64_t> ys =
        dim == 2 ? rep_cache[static_cast<std::size_t>(b)] : std::vector<std::int64_t>{0};
    for (std::int64_t a = 0; a < k; ++a) {
      bool hit = false;
      for (std::int64_t x : rep_cache[static_cast<std::size_t>(a)]) {
        for (std::int64_t y : ys) {
          if (band.hits(x, y)) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      if (hit) {
        table_[static_cast<std::size_t>(a + k * b)] = 1;
        list_.push_back({static_cast<int>(a), static_cast<int>(b)});
      }
    }
  }
}

bool ForbiddenOffsets::forbidden(std::int64_t dx, std::int64_t dy) const {
  const std::int64_t a = mod(dx, k_);
  const std::int64_t b = dim_ == 2 ? mod(dy, k_) : 0;
  return table_[static_cast<std::size_t>(a + static_cast<std::int64_t>(k_) * b)] != 0;
}

// ---------------------------------------------------------------- violations

std::vector<CellPair> torus_violations(const GridIndicator& a, const ForbiddenOffsets& table) {
  if (table.dim() != a.dim() || table.resolution() != a.resolution())
    throw PreconditionError("offset table does not match grid");
  std::vector<CellPair> out;
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    if (!a.at(i)) continue;
    auto [x, y] = a.coords(i);
    for (const auto& [dx, dy] : table.list()) {
      const std::size_t j = a.index(x + dx, y + dy);
      if (j >= i && a.at(j)) out.emplace_back(i, j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CellPair> torus_violations(const GridIndicator& a, const DistanceSet& d,
                                       SlackMode mode) {
  ForbiddenOffsets table(d, a.dim(), exact(a.period()), a.resolution(), mode);
  return torus_violations(a, table);
}

bool certify_avoiding(const GridIndicator& a, const DistanceSet& d) {
  return torus_violations(a, d, SlackMode::conservative).empty();
}

std::vector<CellPair> window_violations(const GridIndicator& window, const DistanceSet& d,
                                        SlackMode mode) {
  BandTest band(d, exact(window.period()), window.resolution(), window.dim(), mode);
  std::vector<std::size_t> occupied;
  for (std::size_t i = 0; i < window.cell_count(); ++i)
    if (window.at(i)) occupied.push_back(i);
  std::vector<CellPair> out;
  for (std::size_t p = 0; p < occupied.size(); ++p) {
    auto [xi, yi] = window.coords(occupied[p]);
    for (std::size_t q = p; q < occupied.size(); ++q) {
      auto [xj, yj] = window.coords(occupied[q]);
      if (band.hits(xj - xi, yj - yi)) out.emplace_back(occupied[p], occupied[q]);
    }
  }
  return out;
}

// --------------------------------------------------------------- periodize

Periodized periodize(const GridIndicator& window, const DistanceSet& d) {
  if (!window_violations(window, d, SlackMode::conservative).empty())
    throw PreconditionError("window is not D-avoiding (conservative check)");
  const int k = window.resolution();
  const Rational side = exact(window.period());
  const Rational diam_cells = d.exact_diam() * k / side;
  // Smallest g with g + 1 - diam_cells >= sqrt(dim): every non-trivial lattice
  // representative then sits at least one full band beyond diam(D).
  auto enough = [&](std::int64_t g) {
    const Rational margin = Rational(g + 1) - diam_cells;
    return margin >= 0 && margin * margin >= window.dim();
  };
  std::int64_t g = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::floor(to_double(diam_cells))) - 1);
  while (!enough(g)) ++g;
  const std::int64_t big_k = k + g;
  if (big_k > 46340) throw PreconditionError("periodized grid too large");
  const double period = to_double(side * big_k / k);
  GridIndicator tiling(window.dim(), period, static_cast<int>(big_k));
  for (std::size_t i = 0; i < window.cell_count(); ++i) {
    if (!window.at(i)) continue;
    auto [x, y] = window.coords(i);
    tiling.set(tiling.index(x, y));
  }
  if (!certify_avoiding(tiling, d))
    throw std::logic_error("periodized tiling failed its conservative certificate");
  return {std::move(tiling), static_cast<int>(g)};
}

// ------------------------------------------------------------- shrink_cells

double shrink_fraction(double eps, int dim) {
  if (!(eps > 0)) throw PreconditionError("eps must be > 0");
  eps = std::min(eps, 0.1);
  return 1.0 - std::pow(3.0, 1.0 / dim) * eps;
}

GridIndicator shrink_cells(const GridIndicator& a, double eps) {
  const double fraction = shrink_fraction(eps, a.dim());
  const int k = a.resolution();
  if (static_cast<std::int64_t>(k) * k > 46340) throw PreconditionError("k^2 too large");
  // The 1e-9 slack keeps a fraction that is 1 up to rounding from losing a cell.
  const int block = std::clamp(static_cast<int>(std::floor(fraction * k + 1e-9)), 0, k);
  const int offset = (k - block) / 2;
  GridIndicator out(a.dim(), a.period(), k * k);
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    if (!a.at(i)) continue;
    auto [x, y] = a.coords(i);
    if (a.dim() == 1) {
      for (int u = 0; u < block; ++u) out.set(out.index(x * k + offset + u));
    } else {
      for (int v = 0; v < block; ++v)
        for (int u = 0; u < block; ++u)
          out.set(out.index(x * k + offset + u, y * k + offset + v));
    }
  }
  return out;
}

// ------------------------------------------------------------ BoundsReport

void BoundsReport::validate() const {
  if (!(0.0 <= lower && lower <= upper && upper <= 1.0))
    throw std::logic_error("bounds report violates 0 <= lower <= upper <= 1");
}

nlohmann::json BoundsReport::to_json() const {
  validate();
  return {{"lower", lower},
          {"upper", upper},
          {"lower_certificate", lower_certificate},
          {"upper_certificate", upper_certificate},
          {"method", method}};
}

// ---------------------------------------------------------- serialization

std::string encode_runs(std::span<const std::uint8_t> cells) {
  std::string out;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    if (!out.empty()) out += ' ';
    out += cells[i] ? "1:" : "0:";
    out += std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<std::uint8_t> decode_runs(std::string_view text, std::size_t expected) {
  std::vector<std::uint8_t> cells;
  cells.reserve(expected);
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    if (token.size() < 3 || (token[0] != '0' && token[0] != '1') || token[1] != ':')
      throw ParseError("bad run token '" + token + "'");
    std::size_t length = 0;
    try {
      std::size_t used = 0;
      length = std::stoull(token.substr(2), &used);
      if (used != token.size() - 2) throw ParseError("bad run token '" + token + "'");
    } catch (const std::logic_error&) {
      throw ParseError("bad run token '" + token + "'");
    }
    if (cells.size() + length > expected) throw ParseError("run-length data exceeds grid size");
    cells.insert(cells.end(), length, token[0] == '1' ? 1 : 0);
  }
  if (cells.size() != expected)
    throw ParseError("run-length data covers " + std::to_string(cells.size()) + " of " +
                     std::to_string(expected) + " cells");
  return cells;
}

nlohmann::json to_json(const GridIndicator& a) {
  return {{"dim", a.dim()},
          {"period", a.period()},
          {"k", a.resolution()},
          {"cells", encode_runs(a.cells())}};
}

GridIndicator grid_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const double period = j.at("period").get<double>();
    const int k = j.at("k").get<int>();
    GridIndicator shape(dim, period, k);
    auto cells = decode_runs(j.at("cells").get<std::string>(), shape.cell_count());
    return GridIndicator::from_cells(dim, period, k, std::move(cells));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("raster JSON: ") + e.what());
  }
}

std::string to_pbm(const GridIndicator& a) {
  if (a.dim() != 2) throw PreconditionError("PBM output needs a 2-D grid");
  const int k = a.resolution();
  std::string out = "P1\n" + std::to_string(k) + " " + std::to_string(k) + "\n";
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      if (x) out += ' ';
      out += a.at(x, y) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

}  // namespace avoid
