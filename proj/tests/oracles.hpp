#pragma once

// Independent brute-force reference implementations. They share no code with
// the library beyond its public data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "avoid/grid.hpp"
#include "avoid/support.hpp"

namespace oracle {

/// alpha of the graph on n <= 24 vertices where u ~ v iff adjacent(u, v).
template <typename Adj>
int brute_alpha(int n, Adj adjacent) {
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int size = __builtin_popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (int u = 0; u < n && ok; ++u) {
      if (!(mask >> u & 1)) continue;
      for (int v = u; v < n && ok; ++v)
        if ((mask >> v & 1) && adjacent(u, v)) ok = false;
    }
    if (ok) best = size;
  }
  return best;
}

/// Largest density of an n-periodic subset of Z avoiding D (the set S + nZ must
/// contain no two points at distance in D).
inline int brute_periodic_alpha(int n, const std::vector<std::int64_t>& d) {
  return brute_alpha(n, [&](int u, int v) {
    for (auto x : d) {
      const std::int64_t diff = ((std::int64_t(v) - u) % n + n) % n;
      if (diff == x % n || (n - diff) % n == x % n) return true;
    }
    return false;
  });
}

inline int brute_interval_alpha(int n, const std::vector<std::int64_t>& d) {
  return brute_alpha(n, [&](int u, int v) {
    for (auto x : d)
      if (v - u == x) return true;
    return false;
  });
}

/// Range of Euclidean distances between points of two half-open cells whose
/// lower corners differ by (ax, ay) cells of width h: the open interval (lo, hi)
/// contains every distance realized, and each endpoint is a limit of realized ones.
struct DistanceRange {
  long double lo;
  long double hi;
};

inline DistanceRange cell_pair_range(long double ax, long double ay, long double h, int dim) {
  auto lo1 = [](long double a) { return std::max<long double>(std::fabs(a) - 1, 0); };
  auto hi1 = [](long double a) { return std::fabs(a) + 1; };
  long double lo2 = lo1(ax) * lo1(ax);
  long double hi2 = hi1(ax) * hi1(ax);
  if (dim == 2) {
    lo2 += lo1(ay) * lo1(ay);
    hi2 += hi1(ay) * hi1(ay);
  }
  return {std::sqrt(lo2) * h, std::sqrt(hi2) * h};
}

/// True iff some pair of points from the periodic union of occupied cells
/// (genuinely) realizes a distance in D, up to a margin: pairs whose distance
/// range only touches d within `margin` are not counted.
inline bool truly_violates(const avoid::GridIndicator& a, const std::vector<double>& d,
                           long double margin = 1e-12L) {
  const int k = a.resolution();
  const int dim = a.dim();
  const long double h = static_cast<long double>(a.period()) / k;
  const double dmax = *std::max_element(d.begin(), d.end());
  const int reach = static_cast<int>(std::ceil(dmax / static_cast<double>(h))) + 2;
  std::vector<std::array<int, 2>> occ;
  for (std::size_t i = 0; i < a.cell_count(); ++i)
    if (a.at(i)) occ.push_back(a.coords(i));
  const int shifts = reach / k + 2;
  for (const auto& p : occ)
    for (const auto& q : occ)
      for (int tx = -shifts; tx <= shifts; ++tx) {
        const int ty_max = dim == 2 ? shifts : 0;
        for (int ty = -ty_max; ty <= ty_max; ++ty) {
          const long double ax = q[0] - p[0] + static_cast<long double>(tx) * k;
          const long double ay = dim == 2 ? q[1] - p[1] + static_cast<long double>(ty) * k : 0;
          const auto r = cell_pair_range(ax, ay, h, dim);
          for (double x : d)
            if (r.lo + margin < x && x < r.hi - margin) return true;
        }
      }
  return false;
}

/// Random grid with each cell set independently with probability p.
inline avoid::GridIndicator random_grid(avoid::Rng& rng, int dim, double period, int k,
                                        double p) {
  avoid::GridIndicator g(dim, period, k);
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    if (rng.bernoulli(p)) g.set(i);
  return g;
}

}  // namespace oracle

namespace oracle {

/// Whether cells offset by (dx, dy) on a k-torus have some lattice-translate
/// center distance strictly inside (d - sqrt(dim), d + sqrt(dim)), all in cells.
/// Sets `near_tie` when some gap sits within 1e-9 of the band edge.
inline bool band_conflict(int dx, int dy, int k, int dim, const std::vector<long double>& d_cells,
                          bool& near_tie) {
  const long double half = std::sqrt(static_cast<long double>(dim));
  long double reach = 0;
  for (auto v : d_cells) reach = std::max(reach, v + half + 1);
  const int shifts = static_cast<int>(reach / k) + 2;
  bool hit = false;
  for (int tx = -shifts; tx <= shifts; ++tx) {
    for (int ty = (dim == 2 ? -shifts : 0); ty <= (dim == 2 ? shifts : 0); ++ty) {
      const long double ax = dx + static_cast<long double>(tx) * k;
      const long double ay = dim == 2 ? dy + static_cast<long double>(ty) * k : 0;
      const long double norm = std::sqrt(ax * ax + ay * ay);
      for (auto v : d_cells) {
        const long double gap = std::fabs(norm - v);
        if (std::fabs(gap - half) < 1e-9L) near_tie = true;
        if (gap < half) hit = true;
      }
    }
  }
  return hit;
}

struct GranularBest {
  int size = 0;
  std::vector<int> cells;  // lexicographically smallest among maximum sets
  bool near_tie = false;
};

/// Exhaustive search over all 2^(k^dim) subsets of a k-torus, k^dim <= 20.
inline GranularBest brute_granular(int k, int dim, const std::vector<long double>& d_cells) {
  const int n = dim == 2 ? k * k : k;
  GranularBest out;
  std::vector<std::vector<char>> conflict(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n)));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      const int dx = ((v % k) - (u % k) + k) % k;
      const int dy = dim == 2 ? ((v / k) - (u / k) + k) % k : 0;
      conflict[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
          band_conflict(dx, dy, k, dim, d_cells, out.near_tie);
    }
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> cells;
    for (int u = 0; u < n; ++u)
      if (mask >> u & 1) cells.push_back(u);
    if (static_cast<int>(cells.size()) < out.size) continue;
    bool ok = true;
    for (std::size_t i = 0; i < cells.size() && ok; ++i)
      for (std::size_t j = i; j < cells.size() && ok; ++j)
        if (conflict[static_cast<std::size_t>(cells[i])][static_cast<std::size_t>(cells[j])]) ok = false;
    if (!ok) continue;
    if (static_cast<int>(cells.size()) > out.size || cells < out.cells) {
      out.size = static_cast<int>(cells.size());
      out.cells = cells;
    }
  }
  return out;
}

}  // namespace oracle
