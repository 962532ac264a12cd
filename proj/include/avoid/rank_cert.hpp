#pragma once

// Checkable consequences of the clique-number argument: squared-distance
// matrices of n points in R^d have rank at most d + 2, (d+3)-subsets with all
// distances distinct are reported, and the generic symmetric zero-diagonal
// determinant is shown to be a nonzero polynomial by random evaluation.

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "avoid/common.hpp"

namespace avoid::rankcert {

using Matrix = std::vector<std::vector<Rational>>;

struct PointConfig {
  int dim = 0;
  std::vector<std::vector<Rational>> points;

  /// Throws unless dim >= 1, n >= 1, every point has dim coordinates and the
  /// points are distinct.
  void validate() const;
};

/// {"dim": d, "points": [[x, y], ...]}; strings are parsed as exact rationals,
/// numbers are taken at their exact binary value.
PointConfig config_from_json(const nlohmann::json& j);

/// a_ij = |x_i - x_j|^2.
Matrix sqdist_matrix(const PointConfig& x);
/// B + B^t - 2C with b_ij = <x_i, x_i> and c_ij = <x_i, x_j>.
Matrix gram_form(const PointConfig& x);

/// Exact rank by fraction-free elimination.
int exact_rank(const Matrix& m);
/// Rank by partial-pivot elimination; pivots below tol * max|entry| count as zero.
int numerical_rank(std::vector<std::vector<double>> m, double tol);

struct RankCheck {
  int rank = 0;
  int bound = 0;  // dim + 2
  bool passes = false;
  bool exact = true;
};

RankCheck rank_bound_check(const PointConfig& x);
/// Float path for configurations given in doubles.
RankCheck rank_bound_check(const std::vector<std::vector<double>>& points, int dim, double tol);

/// Index sets of (dim+3)-subsets whose pairwise distances are all distinct,
/// in lexicographic order. Refuses more than `max_subsets` candidate subsets.
std::vector<std::vector<int>> repeated_distance_audit(const PointConfig& x, int threads = 1,
                                                      std::uint64_t max_subsets = 50'000'000);

inline constexpr std::uint64_t kDefaultPrime = 2147483647;  // 2^31 - 1

bool is_prime(std::uint64_t p);

/// Evaluates the n x n symmetric zero-diagonal determinant at `trials` uniform
/// points mod `prime`; true iff some evaluation is nonzero. Requires
/// 2 <= n <= 9 and a prime above 2^30.
bool generic_symmetric_det_nonzero(int n, int trials, std::uint64_t prime = kDefaultPrime,
                                   std::uint64_t seed = 0);

/// rank, passes and the distinct-distance subsets of one configuration.
nlohmann::json clique_report(const PointConfig& x, int threads = 1);

}  // namespace avoid::rankcert
