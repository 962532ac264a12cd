#pragma once

// The zooming-out operator on rasters: a cell survives when its window of w
// cells per axis holds more than an eps fraction of occupied cells.

#include <cstdint>
#include <vector>

#include "avoid/common.hpp"
#include "avoid/grid.hpp"

namespace avoid::zoom {

struct ZoomParams {
  double delta = 1.0;  // window side, length units
  double eps = 0.5;    // density threshold in (0, 1]
};

/// Window side in cells, round(delta k / L); throws when delta is under one cell.
int window_cells(const GridIndicator& a, double delta);

/// Occupied cells in the window of w cells per axis around every cell. The
/// window spans offsets [-floor((w-1)/2), w-1-floor((w-1)/2)] and wraps around
/// the torus, counting a cell once per covering lattice translate.
std::vector<std::int64_t> window_counts(const GridIndicator& a, int w);

/// Cells whose window count strictly exceeds eps * w^dim (exact comparison).
GridIndicator zoom_out_cells(const GridIndicator& a, int w, const Rational& eps);
GridIndicator zoom_out(const GridIndicator& a, const ZoomParams& p);

/// Union of translates of `a` by every offset with |u_i| <= radius.
GridIndicator dilate(const GridIndicator& a, int radius);

/// Z_w(eps)A dilated by floor((W - w) / 2) cells is inside Z_W(eps (w/W)^dim)A.
bool check_zm_a_cells(const GridIndicator& a, int w, const Rational& eps, int big_w);
/// As above with W = t w; throws PreconditionError unless t >= 1 and t w is a whole
/// number of cells.
bool check_zm_a(const GridIndicator& a, const ZoomParams& p, double t);

/// Z_{w1}(eps1) Z_{w2}(eps2) A is inside Z_{w1+w2}(eps') A with
/// eps' = eps1 eps2 w1^d w2^d / ((w1 + w2)^d min(w1, w2)^d).
bool check_zm_b_cells(const GridIndicator& a, int w1, const Rational& eps1, int w2,
                      const Rational& eps2);
bool check_zm_b(const GridIndicator& a, const ZoomParams& p1, const ZoomParams& p2);

struct BatteryReport {
  int cases = 0;
  int lemma_a_failures = 0;
  int lemma_b_failures = 0;
  int antitone_failures = 0;
  int monotone_failures = 0;
  int translation_failures = 0;
  /// Rasters on which every check held, per dimension.
  int passed_dim1 = 0;
  int passed_dim2 = 0;

  int failures() const {
    return lemma_a_failures + lemma_b_failures + antitone_failures + monotone_failures +
           translation_failures;
  }
};

/// `cases` seeded random rasters per dimension (1 and 2, k <= 64), each run
/// through both lemmas and the order/translation properties.
BatteryReport property_battery(std::uint64_t seed, int cases, int threads = 1);

}  // namespace avoid::zoom
