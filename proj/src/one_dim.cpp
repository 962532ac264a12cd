#include "avoid/one_dim.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "avoid/support.hpp"
#include "mis.hpp"

namespace avoid::onedim {

namespace {

class NodeBudget {
 public:
  explicit NodeBudget(std::uint64_t limit) : limit_(limit) {}
  void tick() {
    if (++used_ > limit_)
      throw SolverLimitError("independence search exceeded node limit " +
                             std::to_string(limit_));
  }
  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

std::vector<std::int64_t> positive_distances(const DistanceSet& d) {
  if (d.mode() != DistanceMode::integer)
    throw PreconditionError("one-dimensional bounds need integer distances");
  return d.integer_values();
}

}  // namespace

CirculantInstance CirculantInstance::make(std::int64_t n, const DistanceSet& d) {
  if (n < 1) throw PreconditionError("circulant period must be >= 1");
  CirculantInstance inst;
  inst.n = n;
  for (auto v : positive_distances(d)) {
    const std::int64_t r = v % n;
    if (r == 0) {
      inst.self_loop = true;
      continue;
    }
    inst.connections.push_back(r);
    inst.connections.push_back(n - r);
  }
  std::sort(inst.connections.begin(), inst.connections.end());
  inst.connections.erase(std::unique(inst.connections.begin(), inst.connections.end()),
                         inst.connections.end());
  return inst;
}

namespace {

// alpha(C_n) is at most `cap`; the search stops as soon as it is reached.
AlphaResult circulant_alpha(const CirculantInstance& inst, const SolverOptions& options,
                            int cap) {
  if (inst.n < 1) throw PreconditionError("circulant period must be >= 1");
  if (inst.n > 100'000) throw PreconditionError("circulant period too large");
  AlphaResult result;
  if (inst.self_loop) return result;
  const int n = static_cast<int>(inst.n);
  std::vector<detail::Bits> adj(static_cast<std::size_t>(n), detail::Bits(n));
  for (int v = 0; v < n; ++v)
    for (auto c : inst.connections) adj[static_cast<std::size_t>(v)].set(static_cast<int>((v + c) % n));
  NodeBudget budget(options.node_limit);
  detail::MisSolver solver(adj, [&budget] { budget.tick(); });

  // Vertex transitivity: some maximum set contains 0, and so does the
  // lexicographically smallest one.
  detail::Bits rest(n);
  for (int v = 1; v < n; ++v)
    if (!adj[0].test(v)) rest.set(v);
  result.alpha = 1 + solver.maximum(rest, std::max(0, cap - 1));

  result.witness = {0};
  int need = result.alpha - 1;
  for (int v = rest.first(); v >= 0 && need > 0; v = rest.next(v)) {
    detail::Bits with = rest;
    with.keep_above(v);
    with.and_not(adj[static_cast<std::size_t>(v)]);
    if (solver.reaches(with, need - 1)) {
      result.witness.push_back(v);
      --need;
      with.set(v);  // keep v so rest.next(v) continues past it
      rest = with;
    }
  }
  if (need != 0) throw std::logic_error("circulant witness extraction failed");
  result.nodes = budget.used();
  return result;
}

}  // namespace

AlphaResult alpha_circulant(const CirculantInstance& inst, const SolverOptions& options) {
  return circulant_alpha(inst, options, static_cast<int>(std::min<std::int64_t>(inst.n, 1 << 30)));
}

std::vector<int> interval_alpha_table(int n_max, const std::vector<std::int64_t>& distances,
                                      const SolverOptions& options) {
  if (n_max < 0) throw PreconditionError("n_max must be >= 0");
  std::vector<std::int64_t> forward;
  for (auto e : distances) {
    if (e <= 0) throw PreconditionError("distances must be positive");
    if (e < n_max) forward.push_back(e);
  }
  std::sort(forward.begin(), forward.end());
  forward.erase(std::unique(forward.begin(), forward.end()), forward.end());
  NodeBudget budget(options.node_limit);
  std::vector<detail::Bits> adj(static_cast<std::size_t>(n_max), detail::Bits(n_max));
  for (int u = 0; u < n_max; ++u)
    for (auto e : forward)
      if (u + e < n_max) {
        adj[static_cast<std::size_t>(u)].set(static_cast<int>(u + e));
        adj[static_cast<std::size_t>(u + e)].set(u);
      }
  detail::MisSolver solver(adj, [&budget] { budget.tick(); });
  // alpha(I_m) is alpha(I_{m-1}) or one more, and a set of the larger size must
  // use vertex 0, since the rest of I_m is a copy of I_{m-1}.
  std::vector<int> alpha{0};
  detail::Bits rest(n_max);
  for (int m = 1; m <= n_max; ++m) {
    if (m > 1 && !adj[0].test(m - 1)) rest.set(m - 1);
    const int target = alpha.back() + 1;
    alpha.push_back(solver.reaches(rest, target - 1) ? target : target - 1);
  }
  return alpha;
}

int alpha_interval(int n, const DistanceSet& d, const SolverOptions& options) {
  if (n < 1) throw PreconditionError("interval length must be >= 1");
  return interval_alpha_table(n, positive_distances(d), options)[static_cast<std::size_t>(n)];
}

bool is_independent_circulant(const CirculantInstance& inst, const std::vector<int>& vertices) {
  if (inst.self_loop) return vertices.empty();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] < 0 || vertices[i] >= inst.n) return false;
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      std::int64_t diff = ((vertices[j] - vertices[i]) % inst.n + inst.n) % inst.n;
      if (diff == 0) return false;
      if (std::binary_search(inst.connections.begin(), inst.connections.end(), diff))
        return false;
    }
  }
  return true;
}

BoundsReport OneDimBounds::report() const {
  BoundsReport r;
  r.lower = boost::rational_cast<double>(lower);
  r.upper = boost::rational_cast<double>(upper);
  std::string mask(static_cast<std::size_t>(lower_n), '0');
  for (int v : lower_witness) mask[static_cast<std::size_t>(v)] = '1';
  r.lower_certificate = {{"kind", "circulant_independent_set"},
                         {"n", lower_n},
                         {"bitmask", mask},
                         {"ratio", to_string(lower)}};
  r.upper_certificate = {
      {"kind", "interval_independence_ratio"}, {"n", upper_n}, {"ratio", to_string(upper)}};
  r.method = exact() ? "circulant/interval bracket (closed)" : "circulant/interval bracket";
  return r;
}

nlohmann::json OneDimBounds::to_json() const {
  nlohmann::json j = report().to_json();
  j["distances"] = d.integer_values();
  j["n_max"] = n_max;
  j["lower_exact"] = to_string(lower);
  j["upper_exact"] = to_string(upper);
  j["exact"] = exact();
  return j;
}

OneDimBounds bounds_1d(const DistanceSet& d, int n_max, int threads,
                       const SolverOptions& options) {
  const auto distances = positive_distances(d);
  if (n_max < distances.back() + 1)
    throw PreconditionError("n_max must be at least max(D) + 1 = " +
                            std::to_string(distances.back() + 1));
  OneDimBounds out{d, n_max, Fraction(0), Fraction(1), 0, {}, 0};

  const auto interval = interval_alpha_table(n_max, distances, options);
  out.upper = Fraction(1);
  out.upper_n = 1;
  for (int n = 1; n <= n_max; ++n) {
    Fraction ratio(interval[static_cast<std::size_t>(n)], n);
    if (ratio < out.upper) {
      out.upper = ratio;
      out.upper_n = n;
    }
  }

  std::vector<AlphaResult> circulant(static_cast<std::size_t>(n_max));
  parallel_for(circulant.size(), threads, [&](std::size_t i) {
    const std::int64_t n = static_cast<std::int64_t>(i) + 1;
    // Averaging windows of the periodic extension: alpha(C_n) <= n alpha(I_j) / j.
    std::int64_t cap = n;
    for (int j = 1; j <= n_max; ++j)
      cap = std::min<std::int64_t>(cap, n * interval[static_cast<std::size_t>(j)] / j);
    circulant[i] = circulant_alpha(CirculantInstance::make(n, d), options, static_cast<int>(cap));
  });
  out.lower = Fraction(0);
  out.lower_n = 1;
  for (int n = 1; n <= n_max; ++n) {
    const auto& res = circulant[static_cast<std::size_t>(n - 1)];
    Fraction ratio(res.alpha, n);
    if (n == 1 || ratio > out.lower) {
      out.lower = ratio;
      out.lower_n = n;
      out.lower_witness = res.witness;
    }
  }
  if (out.lower > out.upper) throw std::logic_error("one-dimensional bracket inverted");
  return out;
}

DistanceSet neighborhood(const DistanceSet& d, std::int64_t k) {
  const auto values = positive_distances(d);
  if (k < 0) throw PreconditionError("neighborhood radius must be >= 0");
  if (k >= values.front())
    throw PreconditionError("neighborhood radius k=" + std::to_string(k) +
                            " must be below min(D)=" + std::to_string(values.front()));
  std::vector<std::int64_t> out;
  for (auto v : values)
    for (std::int64_t j = -k; j <= k; ++j) out.push_back(v + j);
  return DistanceSet::integers(out);
}

DistanceSet folded_neighborhood(const DistanceSet& d, std::int64_t k) {
  const auto values = positive_distances(d);
  if (k < 0) throw PreconditionError("neighborhood radius must be >= 0");
  std::vector<std::int64_t> out;
  for (auto v : values)
    for (std::int64_t j = -k; j <= k; ++j)
      if (v + j != 0) out.push_back(v + j < 0 ? -(v + j) : v + j);
  return DistanceSet::integers(out);
}

std::vector<ProductRow> product_experiment_1d(const DistanceSet& d1, const DistanceSet& d2,
                                              const ProductOptions& options) {
  const auto v1 = positive_distances(d1);
  const auto v2 = positive_distances(d2);
  const std::int64_t k = options.k;
  if (k < 0 || k % 2 != 0)
    throw PreconditionError("k must be a nonnegative even integer, got " + std::to_string(k));
  if (options.t_list.empty()) throw PreconditionError("t list is empty");
  for (auto t : options.t_list)
    if (t < 1) throw PreconditionError("every t must be >= 1, got " + std::to_string(t));

  auto reference_bounds = [&](const DistanceSet& d, std::int64_t diam) {
    const int n = std::max<int>(options.reference_n_max, static_cast<int>(diam) + 1);
    return bounds_1d(d, n, options.threads, options.solver);
  };
  const auto b1 = reference_bounds(d1, v1.back());
  const auto b2 = reference_bounds(d2, v2.back());

  const Fraction slack = Fraction(v1.back()) - Fraction(k) * b1.lower;
  if (slack > Fraction(-1)) {
    std::ostringstream msg;
    msg << "hypothesis diam(D1) - k*m(D1) <= -1 fails: " << v1.back() << " - " << k << "*"
        << to_string(b1.lower) << " = " << to_string(slack) << " > -1";
    throw PreconditionError(msg.str());
  }

  const Fraction reference = b1.lower * b2.lower;
  const bool reference_exact = b1.exact() && b2.exact();

  std::vector<ProductRow> rows;
  for (auto t : options.t_list) {
    const auto scaled = d2.scaled(Rational(t));
    const auto combined = d1.united(folded_neighborhood(scaled, k));
    const auto diam = combined.integer_values().back();
    int n_max = options.n_max > 0 ? options.n_max
                                  : static_cast<int>(options.n_max_factor * t);
    n_max = std::max<int>(n_max, static_cast<int>(diam) + 1);
    const auto b = bounds_1d(combined, n_max, options.threads, options.solver);
    ProductRow row;
    row.t = t;
    row.n_max = n_max;
    row.lower = b.lower;
    row.upper = b.upper;
    row.reference = reference;
    row.reference_exact = reference_exact;
    row.verdict = b.upper < reference ? "verified" : "undecided";
    rows.push_back(row);
  }
  return rows;
}

std::string product_rows_csv(const std::vector<ProductRow>& rows) {
  std::string out = "t,lower,upper,reference,verdict\r\n";
  for (const auto& r : rows)
    out += std::to_string(r.t) + "," + to_string(r.lower) + "," + to_string(r.upper) + "," +
           to_string(r.reference) + "," + r.verdict + "\r\n";
  return out;
}

}  // namespace avoid::onedim
