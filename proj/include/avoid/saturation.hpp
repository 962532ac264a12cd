#pragma once

// Saturation functionals of rasterized sets against atomic symmetric measures,
// and the Fourier-side inequalities that drive supersaturation.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "avoid/grid.hpp"

namespace avoid::saturation {

struct Atom {
  double x = 0.0;
  double y = 0.0;
  double weight = 0.0;
};

/// Finite symmetric probability measure sampling a continuous admissible measure.
class AdmissibleMeasure {
 public:
  enum class Kind { circle, two_point };

  /// Validates symmetry, total weight 1 (within 2^-40) and a positive minimum radius.
  AdmissibleMeasure(int dim, std::vector<Atom> atoms, Kind kind, double radius);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double support_radius_min() const { return r_min_; }
  double support_radius_max() const { return r_max_; }
  Kind kind() const { return kind_; }
  double radius() const { return radius_; }

  /// Fourier transform of the atomic measure, sum_j w_j cos(2 pi <a_j, xi>).
  double transform(double xi, double eta = 0.0) const;
  /// Transform of the continuous measure the atoms sample (J0 for the circle,
  /// cos for the two-point measure).
  double continuous_transform(double radial) const;
  /// sup over |xi| > T of |continuous_transform|.
  double decay(double t) const;

  std::string describe() const;

 private:
  int dim_;
  std::vector<Atom> atoms_;
  Kind kind_;
  double radius_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
};

/// Uniform measure on the circle of the given radius: atoms at angles 2 pi j / n.
AdmissibleMeasure circle_measure(double radius, int n_atoms);
/// (delta_r + delta_{-r}) / 2 on the line.
AdmissibleMeasure two_point_measure(double radius);
/// "circle:<radius>:<atoms>" or "two-point:<radius>".
AdmissibleMeasure parse_measure(std::string_view spec);

/// sup_{x > X} |J0(x)|: |J0(X)| or the extremum at the next zero of J1.
double bessel_j0_tail_sup(double x);

/// Measure with atoms rounded to whole-cell shifts and equal shifts merged.
struct CellMeasure {
  struct Shift {
    int dx = 0;
    int dy = 0;
    double weight = 0.0;
  };
  std::vector<Shift> shifts;  // sorted by (dx, dy)
  double max_residual_cells = 0.0;
  /// Per-atom |residual| per axis in length units, in atom order.
  std::vector<std::array<double, 2>> residuals;
};

CellMeasure discretize(const AdmissibleMeasure& sigma, const GridIndicator& shape);

struct SaturationValue {
  double value = 0.0;
  /// Bound on |value - continuous integral| for the union-of-cells set, from the
  /// atom rounding.
  double error_bound = 0.0;
  int k = 0;
  double period = 0.0;
  std::size_t atoms = 0;
  double max_residual_cells = 0.0;

  nlohmann::json to_json() const;
};

struct SaturationOptions {
  /// Strict mode rejects any atom whose rounding residual exceeds the limit.
  bool strict = false;
  double max_residual_cells = 0.25;
};

/// I_sigma(A) = sum_atoms w h^d #{c : A(c) and A(c + shift)}.
SaturationValue i_sigma(const GridIndicator& a, const AdmissibleMeasure& sigma,
                        const SaturationOptions& options = {});

/// Occupied pairs #{c : A(c) and A(c + s)} per merged shift, in shift order.
std::vector<std::int64_t> pair_counts(const GridIndicator& a, const CellMeasure& m);

/// I_{s1 OR s2}(A) = h^d sum_c A(c) n1(c) n2(c), n_i(c) = sum w A(c + shift).
SaturationValue i_or(const GridIndicator& a, const AdmissibleMeasure& s1,
                     const AdmissibleMeasure& s2, const SaturationOptions& options = {});

/// Absolute constant bounding |1 - Qhat_delta(xi)| <= c1 delta^2 |xi|^2.
double c1_constant(int dim);

/// Cell weights of g * Q_delta averaged over a cell, for a window of w cells:
/// weight[m + reach] for offsets m in [-reach, reach].
std::vector<double> smoothing_weights(int w);

/// g * Q_delta averaged over each cell, for a raster g and window w cells.
std::vector<double> smooth_cells(const std::vector<double>& g, int dim, int k, int w);

/// I(f, g) = integral f(x) g(x + y) dsigma(y) dx for cellwise-constant f, g.
double pair_integral(const std::vector<double>& f, const std::vector<double>& g,
                     const GridIndicator& shape, const CellMeasure& m);

struct ConvGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double c1 = 0.0;
  double decay = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// |I(f, g) - I(f, g * Q_delta)| against (c1 delta^2 T^2 + 2 decay(T)) |f|_2 |g|_2.
ConvGap convlem_gap(const GridIndicator& f, const GridIndicator& g,
                    const AdmissibleMeasure& sigma, double delta, double t);

struct ZoomingOut {
  double i_a = 0.0;
  double i_zoomed = 0.0;
  double bound = 0.0;
  double t = 0.0;
  double decay = 0.0;
  bool holds() const { return i_a >= bound; }
};

/// I(A) >= eps^2 I(Z_delta(eps) A) - 2 (c1 delta^2 T^2 + 2 decay(T)) L^dim, T = delta^-1/2.
ZoomingOut zoomingout_inequality(const GridIndicator& a, const AdmissibleMeasure& sigma,
                                 double delta, double eps);

struct BatteryResult {
  int trials = 0;
  int failures = 0;
  /// Largest lhs/rhs (convlem) or (bound - value) margin seen; diagnostic only.
  double worst = 0.0;
};

struct SaturationBattery {
  BatteryResult avoiding_zero;
  BatteryResult superadditivity;
  BatteryResult monotone;
  BatteryResult translation;
  BatteryResult zooming_out;
  BatteryResult convlem;

  int failures() const;
  nlohmann::json to_json() const;
};

/// Seeded property battery on the unit circle measure (720 atoms), L = 8, k = 64.
/// `trials` rasters per property; zooming-out and convolution checks cycle
/// delta over {1, 2, 4} cells.
SaturationBattery property_battery(std::uint64_t seed, int trials, int threads = 1);

BatteryResult avoiding_battery(std::uint64_t seed, int trials, int threads = 1);
BatteryResult superadditivity_battery(std::uint64_t seed, int trials, int threads = 1);
BatteryResult zoomingout_battery(std::uint64_t seed, int trials, int threads = 1);
BatteryResult convlem_battery(std::uint64_t seed, int trials, int threads = 1);

}  // namespace avoid::saturation
