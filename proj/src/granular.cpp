#include "avoid/granular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avoid/support.hpp"
#include "mis.hpp"

namespace avoid::granular {

namespace {

std::int64_t cell_count(std::int64_t k2, int dim) { return dim == 2 ? k2 * k2 : k2; }

// Conflict structure of the k2 torus: neighbors[c] lists cells j != c whose
// offset from c hits the band; blocked cells conflict with themselves.
struct ConflictGraph {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::uint8_t> blocked;
};

ConflictGraph conflict_graph(const ForbiddenOffsets& table, const GridIndicator& shape) {
  ConflictGraph g;
  const auto n = shape.cell_count();
  g.neighbors.resize(n);
  g.blocked.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    auto [x, y] = shape.coords(c);
    for (const auto& [dx, dy] : table.list()) {
      const std::size_t j = shape.index(x + dx, y + dy);
      if (j == c) {
        g.blocked[c] = 1;
        continue;
      }
      g.neighbors[c].push_back(static_cast<int>(j));
    }
  }
  return g;
}

SearchResult exhaustive_search(const ConflictGraph& g, const GridIndicator& shape) {
  const int n = static_cast<int>(shape.cell_count());
  std::vector<detail::Bits> adjacency(static_cast<std::size_t>(n), detail::Bits(n));
  detail::Bits candidates(n);
  for (int c = 0; c < n; ++c) {
    for (int j : g.neighbors[static_cast<std::size_t>(c)]) adjacency[static_cast<std::size_t>(c)].set(j);
    if (!g.blocked[static_cast<std::size_t>(c)]) candidates.set(c);
  }
  std::int64_t visited = 0;
  detail::MisSolver solver(adjacency, [&visited] { ++visited; });
  const int best = solver.maximum(candidates, n);
  // Lexicographically smallest occupied list: take each cell in order whenever
  // a maximum set through the cells taken so far still exists.
  GridIndicator out(shape.dim(), 1.0, shape.resolution());
  detail::Bits rest = candidates;
  int need = best;
  for (int v = rest.first(); v >= 0 && need > 0; v = rest.next(v)) {
    detail::Bits with = rest;
    with.keep_above(v);
    with.and_not(adjacency[static_cast<std::size_t>(v)]);
    if (solver.reaches(with, need - 1)) {
      out.set(static_cast<std::size_t>(v));
      --need;
      rest = with;
      rest.set(v);
    }
  }
  SearchResult r{out, exact_density(out), false, SearchMode::exhaustive, visited};
  return r;
}

// One annealing run over avoiding sets: every state is independent in the
// conflict graph, so moves that add cells evict the conflicting members.
struct Anneal {
  const ConflictGraph& g;
  const GridIndicator& shape;
  std::vector<std::uint8_t> in;
  std::vector<int> hits;  // members adjacent to each cell
  int size = 0;

  Anneal(const ConflictGraph& graph, const GridIndicator& s)
      : g(graph), shape(s), in(s.cell_count(), 0), hits(s.cell_count(), 0) {}

  void add(std::size_t c) {
    in[c] = 1;
    ++size;
    for (int j : g.neighbors[c]) ++hits[static_cast<std::size_t>(j)];
  }
  void remove(std::size_t c) {
    in[c] = 0;
    --size;
    for (int j : g.neighbors[c]) --hits[static_cast<std::size_t>(j)];
  }
  void insert_evicting(std::size_t c) {
    for (int j : g.neighbors[c])
      if (in[static_cast<std::size_t>(j)]) remove(static_cast<std::size_t>(j));
    add(c);
  }
};

std::pair<std::vector<std::uint8_t>, int> anneal(const ConflictGraph& g, const GridIndicator& shape,
                                                 std::int64_t moves, Rng& rng) {
  Anneal a(g, shape);
  const int k = shape.resolution();
  const auto n = shape.cell_count();
  std::vector<std::uint8_t> best = a.in;
  int best_size = 0;
  constexpr double t_start = 1.5;
  constexpr double t_end = 0.05;
  const double cooling = moves > 1 ? std::pow(t_end / t_start, 1.0 / static_cast<double>(moves - 1)) : 1.0;
  double temp = t_start;
  auto accept = [&](int delta) {
    return delta >= 0 || rng.uniform() < std::exp(delta / temp);
  };
  std::vector<std::size_t> block;
  std::vector<std::uint8_t> mark(n, 0);
  for (std::int64_t step = 0; step < moves; ++step, temp *= cooling) {
    if (shape.dim() == 1 || rng.uniform() < 0.8) {
      const auto c = static_cast<std::size_t>(rng.below(n));
      if (g.blocked[c]) continue;
      if (a.in[c]) {
        if (accept(-1)) a.remove(c);
      } else if (accept(1 - a.hits[c])) {
        a.insert_evicting(c);
      }
    } else {
      // Row or column block of 2..5 cells, toggled as a unit.
      auto [x, y] = shape.coords(static_cast<std::size_t>(rng.below(n)));
      const bool along_x = rng.bernoulli(0.5);
      const int len = static_cast<int>(rng.between(2, std::min(5, k)));
      block.clear();
      bool all_in = true;
      bool usable = true;
      for (int i = 0; i < len; ++i) {
        const auto c = along_x ? shape.index(x + i, y) : shape.index(x, y + i);
        block.push_back(c);
        all_in = all_in && a.in[c];
        usable = usable && !g.blocked[c];
      }
      if (all_in) {
        if (accept(-len))
          for (auto c : block) a.remove(c);
        continue;
      }
      if (!usable) continue;
      for (auto c : block) mark[c] = 1;
      bool internal = false;
      for (auto c : block)
        for (int j : g.neighbors[c]) internal = internal || mark[static_cast<std::size_t>(j)];
      int delta = 0;
      if (!internal) {
        std::vector<std::size_t> evicted;
        for (auto c : block) {
          delta += !a.in[c];
          for (int j : g.neighbors[c]) {
            const auto u = static_cast<std::size_t>(j);
            if (a.in[u] && mark[u] != 2) {
              mark[u] = 2;
              evicted.push_back(u);
            }
          }
        }
        delta -= static_cast<int>(evicted.size());
        for (auto u : evicted) mark[u] = 0;
        if (accept(delta))
          for (auto c : block)
            if (!a.in[c]) a.insert_evicting(c);
      }
      for (auto c : block) mark[c] = 0;
    }
    if (a.size > best_size) {
      best_size = a.size;
      best = a.in;
    }
  }
  return {best, best_size};
}

SearchResult local_search(const ConflictGraph& g, const GridIndicator& shape,
                          const SearchOptions& options) {
  if (options.budget <= 0) throw PreconditionError("local search needs a budget > 0");
  if (options.restarts < 1) throw PreconditionError("local search needs at least one restart");
  const auto restarts = static_cast<std::size_t>(options.restarts);
  std::vector<std::pair<std::vector<std::uint8_t>, int>> runs(restarts);
  const std::int64_t per_run = std::max<std::int64_t>(1, options.budget / options.restarts);
  parallel_for(restarts, options.threads, [&](std::size_t i) {
    Rng rng(options.seed, i);
    runs[i] = anneal(g, shape, per_run, rng);
  });
  // Lowest restart index among the largest sets.
  std::size_t pick = 0;
  for (std::size_t i = 1; i < restarts; ++i)
    if (runs[i].second > runs[pick].second) pick = i;
  GridIndicator best = GridIndicator::from_cells(shape.dim(), 1.0, shape.resolution(),
                                                 std::move(runs[pick].first));
  return {best, exact_density(best), false, SearchMode::local_search,
          per_run * options.restarts};
}

std::string describe_cells(std::int64_t cells) {
  return "enumeration over " + std::to_string(cells) + " cells needs 2^" + std::to_string(cells) +
         " states";
}

}  // namespace

std::string to_string(SearchMode mode) {
  return mode == SearchMode::exhaustive ? "exhaustive" : "local-search";
}

SearchMode parse_mode(std::string_view text) {
  if (text == "exhaustive") return SearchMode::exhaustive;
  if (text == "local" || text == "local-search") return SearchMode::local_search;
  throw ParseError("unknown search mode '" + std::string(text) + "' (expected exhaustive or local)");
}

nlohmann::json ParamSchedule::to_json() const {
  return {{"dim", dim},
          {"requested_eps", requested_eps},
          {"eps", eps},
          {"r", r},
          {"m_tilde", m_tilde},
          {"eps2", eps2},
          {"eps1", eps1},
          {"delta0", delta0},
          {"R0", r0},
          {"R", big_r},
          {"k", k},
          {"k2", k2},
          {"constants", source == ConstantSource::user_supplied
                            ? "user-supplied"
                            : "heuristic stub: 8 eps guarantee not certified"},
          {"R_overridden", r_overridden},
          {"k2_overridden", k2_overridden}};
}

ParamSchedule schedule(double eps, const DistanceSet& d, int dim,
                       std::optional<SupersaturationConstants> constants) {
  if (dim != 1 && dim != 2) throw PreconditionError("only dim 1 and 2 are supported");
  if (!(eps > 0) || !std::isfinite(eps)) throw PreconditionError("eps must be > 0");
  if (d.size() == 0) throw PreconditionError("distance set is empty");
  ParamSchedule s;
  s.dim = dim;
  s.requested_eps = eps;
  s.eps = std::min(eps, 0.1);
  s.r = d.r_min();
  const double diam = d.diam();
  const double side = s.r / std::sqrt(static_cast<double>(dim));
  s.m_tilde = std::pow(side / (side + diam), dim);
  s.eps2 = std::pow(s.eps, 2 * dim);
  s.eps1 = s.m_tilde * s.eps2;
  const auto inv_eps = static_cast<std::int64_t>(std::ceil(1.0 / s.eps));
  if (constants) {
    if (!(constants->delta0 > 0) || !(constants->r0 > 0))
      throw PreconditionError("delta0 and R0 must be > 0");
    s.delta0 = constants->delta0;
    s.r0 = constants->r0;
    s.source = ConstantSource::user_supplied;
  } else {
    s.delta0 = 1.0 / static_cast<double>(inv_eps);
    s.r0 = 4 * diam;
    s.source = ConstantSource::analytic_stub;
  }
  s.big_r = std::max(s.r0, dim * diam / s.eps2);
  s.k = std::max(inv_eps, static_cast<std::int64_t>(std::ceil(1.0 / s.delta0)));
  s.k2 = s.k * s.k;
  return s;
}

nlohmann::json SearchResult::to_json() const {
  return {{"grid", avoid::to_json(best)},
          {"m_prime", avoid::to_string(m_prime)},
          {"m_prime_value", boost::rational_cast<double>(m_prime)},
          {"certified", certified},
          {"search_mode", granular::to_string(mode)},
          {"visited", visited}};
}

SearchResult enumerate_granular(const DistanceSet& d_scaled, int k2, int dim,
                                const SearchOptions& options) {
  if (dim != 1 && dim != 2) throw PreconditionError("only dim 1 and 2 are supported");
  if (k2 < 1) throw PreconditionError("k2 must be >= 1");
  const std::int64_t cells = cell_count(k2, dim);
  if (options.mode == SearchMode::exhaustive && cells > kExhaustiveCellLimit)
    throw PreconditionError("exhaustive " + describe_cells(cells) + "; the limit is " +
                            std::to_string(kExhaustiveCellLimit) + " cells");
  if (cells > kSearchCellLimit)
    throw PreconditionError("grid of " + std::to_string(cells) + " cells exceeds the search limit " +
                            std::to_string(kSearchCellLimit));
  const GridIndicator shape(dim, 1.0, k2);
  const ForbiddenOffsets table(d_scaled, dim, Rational(1), k2, SlackMode::conservative);
  const auto graph = conflict_graph(table, shape);
  SearchResult r = options.mode == SearchMode::exhaustive ? exhaustive_search(graph, shape)
                                                          : local_search(graph, shape, options);
  r.certified = torus_violations(r.best, table).empty();
  return r;
}

nlohmann::json Approximation::to_json() const {
  return {{"m_prime", avoid::to_string(m_prime)},
          {"m_prime_value", boost::rational_cast<double>(m_prime)},
          {"schedule", schedule.to_json()},
          {"result", result.to_json()},
          {"guarantees", guarantees}};
}

Approximation m_approx(double eps, const DistanceSet& d, int dim, const Overrides& overrides) {
  Approximation out;
  out.schedule = schedule(eps, d, dim, overrides.constants);
  auto& s = out.schedule;
  if (overrides.big_r) {
    if (!(*overrides.big_r > 0)) throw PreconditionError("R must be > 0");
    s.big_r = *overrides.big_r;
    s.r_overridden = true;
  }
  if (overrides.k2) {
    if (*overrides.k2 < 1) throw PreconditionError("k2 must be >= 1");
    s.k2 = *overrides.k2;
    s.k2_overridden = true;
  }
  const std::int64_t cells =
      s.k2 > (std::int64_t{1} << 31) ? std::numeric_limits<std::int64_t>::max() : cell_count(s.k2, dim);
  if (overrides.search.mode == SearchMode::exhaustive && cells > kExhaustiveCellLimit)
    throw PreconditionError("schedule gives k2 = " + std::to_string(s.k2) + "; exhaustive " +
                            describe_cells(cells) + " (limit " +
                            std::to_string(kExhaustiveCellLimit) + " cells); override R and k2");
  if (cells > kSearchCellLimit)
    throw PreconditionError("schedule gives k2 = " + std::to_string(s.k2) + ", " +
                            describe_cells(cells) + "; override R and k2");
  const DistanceSet scaled = d.scaled(Rational(1) / exact(s.big_r));
  out.result = enumerate_granular(scaled, static_cast<int>(s.k2), dim, overrides.search);
  out.m_prime = out.result.m_prime;
  out.guarantees.push_back(out.result.certified ? "lower bound, certified"
                                                : "lower bound, not certified");
  if (out.result.certified && overrides.search.mode == SearchMode::exhaustive &&
      !s.r_overridden && !s.k2_overridden && s.source == ConstantSource::user_supplied)
    out.guarantees.push_back("within 8 eps of m(D)");
  return out;
}

std::vector<ScanRow> product_scan(const DistanceSet& d1, const DistanceSet& d2,
                                  const std::vector<Rational>& t_list, int dim,
                                  const Overrides& overrides) {
  if (dim != 2) throw PreconditionError("product scan needs dim 2");
  if (!overrides.big_r || !overrides.k2)
    throw PreconditionError("product scan needs explicit R and k2 overrides");
  if (d1.size() == 0 || d2.size() == 0) throw PreconditionError("distance sets must be nonempty");
  const Rational half_period = exact(*overrides.big_r) / 2;
  for (const auto& t : t_list) {
    if (t <= 0) throw PreconditionError("t must be > 0");
    if (t * d2.exact_diam() >= half_period)
      throw PreconditionError("t * diam(D2) = " + avoid::to_string(Rational(t * d2.exact_diam())) +
                              " reaches half the period R/2 = " + avoid::to_string(half_period) +
                              "; increase R");
  }
  constexpr double kEps = 0.1;
  const auto lower1 = m_approx(kEps, d1, dim, overrides);
  const auto lower2 = m_approx(kEps, d2, dim, overrides);
  std::vector<ScanRow> rows;
  for (const auto& t : t_list) {
    const auto joint = m_approx(kEps, d1.united(d2.scaled(t)), dim, overrides);
    ScanRow row;
    row.t = t;
    row.lower_union = joint.m_prime;
    row.lower1 = lower1.m_prime;
    row.lower2 = lower2.m_prime;
    row.product = lower1.m_prime * lower2.m_prime;
    row.certified = joint.result.certified && lower1.result.certified && lower2.result.certified;
    rows.push_back(row);
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "t,lower_union,lower_d1,lower_d2,product,certified\r\n";
  for (const auto& r : rows)
    out += avoid::to_string(r.t) + "," + avoid::to_string(r.lower_union) + "," +
           avoid::to_string(r.lower1) + "," + avoid::to_string(r.lower2) + "," +
           avoid::to_string(r.product) + "," +
           (r.certified ? "true" : "false") + "\r\n";
  return out;
}

}  // namespace avoid::granular
