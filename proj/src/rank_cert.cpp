#include "avoid/rank_cert.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "avoid/support.hpp"

namespace avoid::rankcert {

namespace {

Rational squared_distance(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rational diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  for (a %= p; e; e >>= 1, a = mul_mod(a, a, p))
    if (e & 1) r = mul_mod(r, a, p);
  return r;
}

std::uint64_t det_mod(std::vector<std::vector<std::uint64_t>> m, std::uint64_t p) {
  const std::size_t n = m.size();
  std::uint64_t det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = (p - det) % p;
    }
    det = mul_mod(det, m[col][col], p);
    const std::uint64_t inv = pow_mod(m[col][col], p - 2, p);
    for (std::size_t r = col + 1; r < n; ++r) {
      const std::uint64_t f = mul_mod(m[r][col], inv, p);
      if (f == 0) continue;
      for (std::size_t c = col; c < n; ++c)
        m[r][c] = (m[r][c] + p - mul_mod(f, m[col][c], p)) % p;
    }
  }
  return det;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace

void PointConfig::validate() const {
  if (dim < 1) throw PreconditionError("dimension must be >= 1");
  if (points.empty()) throw PreconditionError("configuration has no points");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != dim)
      throw PreconditionError("every point needs exactly " + std::to_string(dim) + " coordinates");
  std::set<std::vector<Rational>> seen(points.begin(), points.end());
  if (seen.size() != points.size()) throw PreconditionError("points must be distinct");
}

PointConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("points")) throw ParseError("expected {\"dim\", \"points\"}");
  PointConfig x;
  try {
    x.dim = j.at("dim").get<int>();
    for (const auto& p : j.at("points")) {
      std::vector<Rational> coords;
      for (const auto& c : p) {
        if (c.is_string()) {
          coords.push_back(parse_rational(c.get<std::string>()));
        } else if (c.is_number()) {
          coords.push_back(exact(c.get<double>()));
        } else {
          throw ParseError("coordinates must be numbers or rational strings");
        }
      }
      x.points.push_back(std::move(coords));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed point file: ") + e.what());
  }
  x.validate();
  return x;
}

Matrix sqdist_matrix(const PointConfig& x) {
  const std::size_t n = x.points.size();
  Matrix a(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[i][j] = a[j][i] = squared_distance(x.points[i], x.points[j]);
  return a;
}

Matrix gram_form(const PointConfig& x) {
  const std::size_t n = x.points.size();
  auto dot = [&](std::size_t i, std::size_t j) {
    Rational s = 0;
    for (int c = 0; c < x.dim; ++c) s += x.points[i][static_cast<std::size_t>(c)] * x.points[j][static_cast<std::size_t>(c)];
    return s;
  };
  Matrix a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = dot(i, i) + dot(j, j) - 2 * dot(i, j);
  return a;
}

int exact_rank(const Matrix& m) {
  if (m.empty()) return 0;
  // Clear denominators, then Bareiss elimination keeps every entry an integer.
  BigInt scale = 1;
  for (const auto& row : m)
    for (const auto& v : row) scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(v));
  std::vector<std::vector<BigInt>> a;
  for (const auto& row : m) {
    std::vector<BigInt> r;
    for (const auto& v : row) r.push_back(boost::multiprecision::numerator(v) * (scale / boost::multiprecision::denominator(v)));
    a.push_back(std::move(r));
  }
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c)
        a[r][c] = (a[r][c] * a[rank][col] - a[r][col] * a[rank][c]) / prev;
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

int numerical_rank(std::vector<std::vector<double>> m, double tol) {
  if (m.empty()) return 0;
  double largest = 0.0;
  for (const auto& row : m)
    for (double v : row) largest = std::max(largest, std::fabs(v));
  const double threshold = tol * largest;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    if (!(std::fabs(m[pivot][col]) > threshold)) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = m[r][col] / m[rank][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

RankCheck rank_bound_check(const PointConfig& x) {
  x.validate();
  RankCheck r;
  r.rank = exact_rank(sqdist_matrix(x));
  r.bound = x.dim + 2;
  r.passes = r.rank <= r.bound;
  return r;
}

RankCheck rank_bound_check(const std::vector<std::vector<double>>& points, int dim, double tol) {
  if (dim < 1) throw PreconditionError("dimension must be >= 1");
  if (!(tol > 0)) throw PreconditionError("tolerance must be > 0");
  const std::size_t n = points.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(points[i].size()) != dim)
      throw PreconditionError("every point needs exactly " + std::to_string(dim) + " coordinates");
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < dim; ++c) {
        const double diff = points[i][static_cast<std::size_t>(c)] - points[j][static_cast<std::size_t>(c)];
        s += diff * diff;
      }
      a[i][j] = s;
    }
  }
  RankCheck r;
  r.rank = numerical_rank(std::move(a), tol);
  r.bound = dim + 2;
  r.passes = r.rank <= r.bound;
  r.exact = false;
  return r;
}

std::vector<std::vector<int>> repeated_distance_audit(const PointConfig& x, int threads,
                                                      std::uint64_t max_subsets) {
  x.validate();
  const int n = static_cast<int>(x.points.size());
  const int size = x.dim + 3;
  if (n < size) return {};
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(size));
  if (total > max_subsets)
    throw PreconditionError("audit needs " + std::to_string(total) + " subsets, above the limit " +
                            std::to_string(max_subsets));
  const auto a = sqdist_matrix(x);
  // Partitioned by the first index; each part lists its subsets in lexicographic order.
  std::vector<std::vector<std::vector<int>>> parts(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t first) {
    std::vector<int> pick{static_cast<int>(first)};
    auto recurse = [&](auto& self, int next) -> void {
      if (static_cast<int>(pick.size()) == size) {
        std::vector<Rational> seen;
        for (std::size_t i = 0; i < pick.size(); ++i)
          for (std::size_t j = i + 1; j < pick.size(); ++j)
            seen.push_back(a[static_cast<std::size_t>(pick[i])][static_cast<std::size_t>(pick[j])]);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) == seen.end()) parts[first].push_back(pick);
        return;
      }
      for (int v = next; v <= n - (size - static_cast<int>(pick.size())); ++v) {
        pick.push_back(v);
        self(self, v + 1);
        pick.pop_back();
      }
    };
    recurse(recurse, static_cast<int>(first) + 1);
  });
  std::vector<std::vector<int>> out;
  for (auto& p : parts)
    for (auto& s : p) out.push_back(std::move(s));
  return out;
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (p == q) return true;
    if (p % q == 0) return false;
  }
  std::uint64_t d = p - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  // These bases decide primality for every 64-bit integer.
  for (std::uint64_t base : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(base, d, p);
    if (x == 1 || x == p - 1) continue;
    bool composite = true;
    for (int i = 1; i < s && composite; ++i) {
      x = mul_mod(x, x, p);
      if (x == p - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

bool generic_symmetric_det_nonzero(int n, int trials, std::uint64_t prime, std::uint64_t seed) {
  if (n < 2 || n > 9) throw PreconditionError("n must lie in [2, 9]");
  if (trials < 1) throw PreconditionError("trials must be >= 1");
  if (prime <= (1ULL << 30) || !is_prime(prime))
    throw PreconditionError("modulus must be a prime above 2^30");
  Rng rng(seed, static_cast<std::uint64_t>(n));
  const auto un = static_cast<std::size_t>(n);
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<std::uint64_t>> m(un, std::vector<std::uint64_t>(un, 0));
    for (std::size_t i = 0; i < un; ++i)
      for (std::size_t j = i + 1; j < un; ++j) m[i][j] = m[j][i] = rng.below(prime);
    if (det_mod(std::move(m), prime) != 0) return true;
  }
  return false;
}

nlohmann::json clique_report(const PointConfig& x, int threads) {
  const auto check = rank_bound_check(x);
  nlohmann::json subsets = nlohmann::json::array();
  for (const auto& s : repeated_distance_audit(x, threads)) subsets.push_back(s);
  return {{"dim", x.dim},
          {"n", x.points.size()},
          {"rank", check.rank},
          {"bound", check.bound},
          {"passes", check.passes},
          {"exact", check.exact},
          {"distinct_distance_subsets", subsets}};
}

}  // namespace avoid::rankcert
