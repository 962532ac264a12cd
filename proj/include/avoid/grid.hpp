#pragma once

// Distance sets, rasterized periodic sets on tori, and avoidance certificates.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "avoid/common.hpp"

namespace avoid {

enum class DistanceMode { integer, real };

/// Finite set of forbidden distances, kept as exact rationals.
class DistanceSet {
 public:
  /// Sorts and deduplicates; throws PreconditionError on an empty set, a
  /// nonpositive value, or a non-integer value in integer mode.
  DistanceSet(std::vector<Rational> values, DistanceMode mode);

  static DistanceSet integers(const std::vector<std::int64_t>& values);
  static DistanceSet reals(const std::vector<double>& values);

  /// Comma-separated list such as "1,2,5" or "0.5,1/3". Empty fields are a ParseError.
  static DistanceSet parse(std::string_view text, DistanceMode mode);

  DistanceMode mode() const { return mode_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& exact_values() const { return values_; }
  std::vector<double> values() const;
  std::vector<std::int64_t> integer_values() const;

  const Rational& exact_min() const { return values_.front(); }
  const Rational& exact_diam() const { return values_.back(); }
  double r_min() const { return to_double(values_.front()); }
  double diam() const { return to_double(values_.back()); }

  /// factor * D; the result is in integer mode iff every scaled value is an integer.
  DistanceSet scaled(const Rational& factor) const;
  DistanceSet united(const DistanceSet& other) const;

  std::string to_string() const;

  friend bool operator==(const DistanceSet&, const DistanceSet&) = default;

 private:
  std::vector<Rational> values_;
  DistanceMode mode_;
};

/// Boolean raster of a Z^dim * L periodic set: k cells of width L/k per axis.
/// Cell (x, y) is the half-open cube [x, x+1) * [y, y+1) scaled by L/k and has
/// flat index x + k*y.
class GridIndicator {
 public:
  GridIndicator(int dim, double period, int resolution);

  static GridIndicator full(int dim, double period, int resolution);
  static GridIndicator from_cells(int dim, double period, int resolution,
                                  std::vector<std::uint8_t> cells);

  int dim() const { return dim_; }
  double period() const { return period_; }
  int resolution() const { return k_; }
  double cell_width() const { return period_ / k_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool at(std::size_t index) const { return cells_[index] != 0; }
  bool at(int x, int y = 0) const { return cells_[index(x, y)] != 0; }
  void set(std::size_t index, bool value = true) { cells_[index] = value ? 1 : 0; }
  void set(int x, int y, bool value = true) { cells_[index(x, y)] = value ? 1 : 0; }

  /// Flat index of the cell at (x, y), coordinates reduced mod k.
  std::size_t index(std::int64_t x, std::int64_t y = 0) const;
  std::array<int, 2> coords(std::size_t index) const;

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t occupied_count() const;

  /// Translate by whole cells on the torus.
  GridIndicator shifted(std::int64_t dx, std::int64_t dy = 0) const;
  /// Same set at resolution factor*k.
  GridIndicator refined(int factor) const;

  bool subset_of(const GridIndicator& other) const;
  GridIndicator united(const GridIndicator& other) const;

  friend bool operator==(const GridIndicator&, const GridIndicator&) = default;

 private:
  int dim_;
  double period_;
  int k_;
  std::vector<std::uint8_t> cells_;
};

/// Density of the periodic union of cells: occupied / k^dim.
double density(const GridIndicator& a);
Fraction exact_density(const GridIndicator& a);

enum class SlackMode {
  /// Center distance within tol = 2^-40 L of some d.
  exact_center,
  /// Center distance strictly inside (d - cellDiag, d + cellDiag); an empty
  /// result certifies the union of half-open cells avoids every d.
  conservative,
};

/// Decides, exactly, whether a cell displacement (in units of cells) lies in
/// the violation band of some distance.
class BandTest {
 public:
  /// Cells of width period / resolution; the exact-center tolerance is 2^-40 * period.
  BandTest(const DistanceSet& d, const Rational& period, int resolution, int dim,
           SlackMode mode);

  bool hits(std::int64_t dx, std::int64_t dy = 0) const;
  /// Largest displacement norm (in cells) that can possibly hit.
  double reach() const { return reach_; }

 private:
  bool hits_exact(const BigInt& s, const Rational& a) const;

  std::vector<Rational> scaled_;  // d / cell_width
  std::vector<double> scaled_approx_;
  int dim_;
  SlackMode mode_;
  double tol_cells_;
  double reach_;
};

/// Offsets (mod k) whose lattice representatives hit the band, for a torus.
class ForbiddenOffsets {
 public:
  ForbiddenOffsets(const DistanceSet& d, int dim, const Rational& period, int resolution,
                   SlackMode mode);

  bool forbidden(std::int64_t dx, std::int64_t dy = 0) const;
  /// Offsets as (dx, dy) with 0 <= dx, dy < k.
  const std::vector<std::array<int, 2>>& list() const { return list_; }
  int resolution() const { return k_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  int k_;
  std::vector<std::uint8_t> table_;
  std::vector<std::array<int, 2>> list_;
};

using CellPair = std::pair<std::size_t, std::size_t>;

/// Unordered occupied pairs (i <= j, sorted) violating D on the torus, including
/// a cell paired with itself through its periodic translates.
std::vector<CellPair> torus_violations(const GridIndicator& a, const DistanceSet& d,
                                       SlackMode mode);
std::vector<CellPair> torus_violations(const GridIndicator& a, const ForbiddenOffsets& table);

/// True iff conservative torus_violations is empty.
bool certify_avoiding(const GridIndicator& a, const DistanceSet& d);

/// Violations among occupied cells of a grid read as a non-periodic window.
std::vector<CellPair> window_violations(const GridIndicator& window, const DistanceSet& d,
                                        SlackMode mode);

struct Periodized {
  GridIndicator tiling;
  int gap_cells;  // empty cells inserted per axis after the window
};

/// Tiles a D-avoiding window (its `period` is the window side R) with period
/// R + gap, gap being diam(D) plus the conservative band rounded up to whole cells.
Periodized periodize(const GridIndicator& window, const DistanceSet& d);

/// Shrink fraction 1 - 3^(1/dim) eps, clamping eps to 1/10.
double shrink_fraction(double eps, int dim);

/// Refines to resolution k*k, keeping in each occupied coarse cell a centered
/// block of floor(fraction * k) fine cells per axis.
GridIndicator shrink_cells(const GridIndicator& a, double eps);

/// Summary of a two-sided bound on m(D).
struct BoundsReport {
  double lower = 0.0;
  double upper = 1.0;
  nlohmann::json lower_certificate;
  nlohmann::json upper_certificate;
  std::string method;

  void validate() const;
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const GridIndicator& a);
GridIndicator grid_from_json(const nlohmann::json& j);

/// "0:3 1:2 0:11": runs over the flat cell order, each tagged with its bit.
std::string encode_runs(std::span<const std::uint8_t> cells);
std::vector<std::uint8_t> decode_runs(std::string_view text, std::size_t expected);

/// Plain PBM (P1) raster of a 2-D grid, row y = 0 first.
std::string to_pbm(const GridIndicator& a);

}  // namespace avoid
