#pragma once

// Certified brackets on m(D) for finite D in Z: periodic constructions give the
// lower bound (circulant graphs), windowed averaging gives the upper bound
// (distance graphs on a path).

#include <cstdint>
#include <string>
#include <vector>

#include "avoid/common.hpp"
#include "avoid/grid.hpp"

namespace avoid::onedim {

struct SolverOptions {
  /// Search nodes allowed per independence-number computation.
  std::uint64_t node_limit = 2'000'000'000ULL;
};

/// C_n(D): vertices Z_n, edges between residues differing by d mod n.
struct CirculantInstance {
  std::int64_t n = 1;
  /// Nonzero residues, sorted, closed under negation mod n.
  std::vector<std::int64_t> connections;
  /// Some d is a multiple of n: every vertex is adjacent to itself.
  bool self_loop = false;

  static CirculantInstance make(std::int64_t n, const DistanceSet& d);
};

struct AlphaResult {
  int alpha = 0;
  /// Lexicographically smallest maximum independent set (sorted vertices).
  std::vector<int> witness;
  std::uint64_t nodes = 0;
};

AlphaResult alpha_circulant(const CirculantInstance& inst, const SolverOptions& options = {});

/// alpha(I_m(D)) for m = 0..n_max, where I_m has vertices 0..m-1 and edges at
/// differences in `distances`.
std::vector<int> interval_alpha_table(int n_max, const std::vector<std::int64_t>& distances,
                                      const SolverOptions& options = {});

int alpha_interval(int n, const DistanceSet& d, const SolverOptions& options = {});

/// True iff `vertices` is independent in C_n(D) (direct O(n^2) re-check).
bool is_independent_circulant(const CirculantInstance& inst, const std::vector<int>& vertices);

struct OneDimBounds {
  DistanceSet d;
  int n_max = 0;
  Fraction lower{0};
  Fraction upper{1};
  int lower_n = 0;
  std::vector<int> lower_witness;
  int upper_n = 0;

  bool exact() const { return lower == upper; }
  BoundsReport report() const;
  nlohmann::json to_json() const;
};

/// lower = max_{n<=n_max} alpha(C_n)/n, upper = min_{n<=n_max} alpha(I_n)/n.
/// Ties go to the smaller n. The result does not depend on `threads`.
OneDimBounds bounds_1d(const DistanceSet& d, int n_max, int threads = 1,
                       const SolverOptions& options = {});

/// D^k = {x : |x - y| <= k for some y in D}; requires 0 <= k < min D.
DistanceSet neighborhood(const DistanceSet& d, std::int64_t k);

/// |x| for x in D^k with x != 0. Used when D^k reaches across the origin.
DistanceSet folded_neighborhood(const DistanceSet& d, std::int64_t k);

struct ProductOptions {
  std::int64_t k = 0;
  std::vector<std::int64_t> t_list;
  /// Fixed n_max for every t; 0 means n_max_factor * t (at least diam + 1).
  int n_max = 0;
  int n_max_factor = 3;
  /// n_max used to bracket m(D1) and m(D2) themselves.
  int reference_n_max = 24;
  int threads = 1;
  SolverOptions solver;
};

struct ProductRow {
  std::int64_t t = 0;
  int n_max = 0;
  Fraction lower{0};
  Fraction upper{1};
  /// Certified lower bound on m(D1) m(D2); exact when both brackets closed.
  Fraction reference{0};
  bool reference_exact = false;
  /// "verified" when upper < reference, otherwise "undecided".
  std::string verdict;
};

/// Brackets m(D1 u (t D2)^k) per t against m(D1) m(D2). Throws PreconditionError
/// when k is odd or diam D1 - k * lower(m(D1)) > -1.
std::vector<ProductRow> product_experiment_1d(const DistanceSet& d1, const DistanceSet& d2,
                                              const ProductOptions& options);

/// RFC 4180 CSV with header t,lower,upper,reference,verdict.
std::string product_rows_csv(const std::vector<ProductRow>& rows);

}  // namespace avoid::onedim
