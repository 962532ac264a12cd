#pragma once

// Certified lower bounds on m(D) from periodic granular sets: the parameter
// schedule of the approximation algorithm, exhaustive and annealing searches
// over k2-granular period-1 sets, and the product scan.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "avoid/common.hpp"
#include "avoid/grid.hpp"

namespace avoid::granular {

enum class SearchMode { exhaustive, local_search };

std::string to_string(SearchMode mode);
SearchMode parse_mode(std::string_view text);

/// Where delta0 and R0 came from: the supersaturation constants are not
/// explicit, so either the caller supplies them or a labeled stub is used.
enum class ConstantSource { analytic_stub, user_supplied };

struct ParamSchedule {
  int dim = 0;
  double requested_eps = 0.0;
  double eps = 0.0;  // min(requested_eps, 1/10)
  double r = 0.0;
  double m_tilde = 0.0;
  double eps2 = 0.0;
  double eps1 = 0.0;
  double delta0 = 0.0;
  double r0 = 0.0;
  double big_r = 0.0;
  std::int64_t k = 0;
  std::int64_t k2 = 0;
  ConstantSource source = ConstantSource::analytic_stub;
  bool r_overridden = false;
  bool k2_overridden = false;

  nlohmann::json to_json() const;
};

struct SupersaturationConstants {
  double delta0 = 0.0;
  double r0 = 0.0;
};

/// Fills every field from eps, D and dim. Without `constants` the stub
/// delta0 = 1 / ceil(1 / eps), R0 = 4 diam D is used and recorded.
ParamSchedule schedule(double eps, const DistanceSet& d, int dim,
                       std::optional<SupersaturationConstants> constants = std::nullopt);

/// Largest cell count the exhaustive mode accepts.
inline constexpr std::int64_t kExhaustiveCellLimit = 25;
/// Largest cell count the local search accepts.
inline constexpr std::int64_t kSearchCellLimit = 1 << 20;

struct SearchOptions {
  SearchMode mode = SearchMode::exhaustive;
  /// Local search: annealing moves, split evenly across restarts.
  std::int64_t budget = 1'000'000;
  std::uint64_t seed = 0;
  int restarts = 8;
  int threads = 1;
};

struct SearchResult {
  GridIndicator best{1, 1.0, 1};
  Fraction m_prime;
  /// The final set passed the conservative avoidance check.
  bool certified = false;
  SearchMode mode = SearchMode::exhaustive;
  std::int64_t visited = 0;

  nlohmann::json to_json() const;
};

/// Best k2-granular period-1 set avoiding `d_scaled` under the conservative band.
/// Exhaustive mode is exact with the lexicographically smallest list of occupied
/// cells among maximum sets; it refuses more than kExhaustiveCellLimit cells.
/// Local search anneals over avoiding sets and is deterministic given the seed.
SearchResult enumerate_granular(const DistanceSet& d_scaled, int k2, int dim,
                                const SearchOptions& options);

struct Overrides {
  std::optional<double> big_r;
  std::optional<std::int64_t> k2;
  std::optional<SupersaturationConstants> constants;
  SearchOptions search;
};

struct Approximation {
  Fraction m_prime;
  ParamSchedule schedule;
  SearchResult result;
  /// "lower bound, certified", plus "within 8 eps of m(D)" only for an exhaustive
  /// run on the unmodified schedule with caller-supplied constants.
  std::vector<std::string> guarantees;

  nlohmann::json to_json() const;
};

/// Schedule plus search on (1/R) D. Refuses, with the state count, schedules
/// whose exhaustive enumeration is out of reach.
Approximation m_approx(double eps, const DistanceSet& d, int dim, const Overrides& overrides);

struct ScanRow {
  Rational t;
  Fraction lower_union;
  Fraction lower1;
  Fraction lower2;
  Fraction product;
  bool certified = false;
};

/// For each t, certified lower bounds on m(D1 u t D2), m(D1), m(D2) and their
/// product, all at the overridden R and k2. Requires dim 2 and both overrides.
std::vector<ScanRow> product_scan(const DistanceSet& d1, const DistanceSet& d2,
                                  const std::vector<Rational>& t_list, int dim,
                                  const Overrides& overrides);

/// CSV with header t,lower_union,lower_d1,lower_d2,product,certified and CRLF rows.
std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace avoid::granular
