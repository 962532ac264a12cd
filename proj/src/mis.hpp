#pragma once

// Maximum independent set by branch and bound on bitset adjacency. Internal to
// the library; graphs here have at most a few thousand vertices.

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

namespace avoid::detail {

class Bits {
 public:
  Bits() = default;
  explicit Bits(int n) : n_(n), w_(static_cast<std::size_t>((n + 63) / 64), 0) {}

  int size() const { return n_; }
  void set(int i) { w_[static_cast<std::size_t>(i >> 6)] |= 1ULL << (i & 63); }
  void reset(int i) { w_[static_cast<std::size_t>(i >> 6)] &= ~(1ULL << (i & 63)); }
  bool test(int i) const { return (w_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1ULL; }
  bool any() const {
    for (auto x : w_)
      if (x) return true;
    return false;
  }
  int count() const {
    int c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
  }
  int count_and(const Bits& o) const {
    int c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }
  /// Lowest set index, or -1.
  int first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return static_cast<int>(i * 64) + std::countr_zero(w_[i]);
    return -1;
  }
  /// Lowest set index > i, or -1.
  int next(int i) const {
    ++i;
    if (i >= n_) return -1;
    std::size_t wi = static_cast<std::size_t>(i >> 6);
    std::uint64_t word = w_[wi] & (~0ULL << (i & 63));
    while (true) {
      if (word) return static_cast<int>(wi * 64) + std::countr_zero(word);
      if (++wi >= w_.size()) return -1;
      word = w_[wi];
    }
  }
  Bits& operator&=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  Bits& and_not(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  /// Keeps only indices > i.
  void keep_above(int i) {
    for (int j = 0; j <= i && j < n_; ++j) {
      if ((j & 63) == 0 && j + 63 <= i) {
        w_[static_cast<std::size_t>(j >> 6)] = 0;
        j += 63;
        continue;
      }
      reset(j);
    }
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// Exact independence number with optional early stop, counted against a node budget.
class MisSolver {
 public:
  /// adjacency[v] must not contain v.
  MisSolver(std::vector<Bits> adjacency, std::function<void()> tick)
      : adj_(std::move(adjacency)), tick_(std::move(tick)) {}

  /// Largest independent subset of `candidates`; stops early once `stop_at` is reached.
  int maximum(const Bits& candidates, int stop_at) {
    best_ = 0;
    stop_at_ = stop_at;
    search(candidates, 0);
    return best_;
  }

  /// True iff `candidates` contains an independent set of size `need`.
  bool reaches(const Bits& candidates, int need) {
    if (need <= 0) return true;
    best_ = need - 1;
    stop_at_ = need;
    search(candidates, 0);
    return best_ >= need;
  }

 private:
  int cover_bound(const Bits& p) const {
    // Greedy partition into cliques; an independent set meets each clique once.
    Bits rest = p;
    int cliques = 0;
    for (int v = rest.first(); v >= 0; v = rest.first()) {
      ++cliques;
      rest.reset(v);
      Bits cand = rest;
      cand &= adj_[static_cast<std::size_t>(v)];
      for (int u = cand.first(); u >= 0; u = cand.first()) {
        rest.reset(u);
        cand.reset(u);
        cand &= adj_[static_cast<std::size_t>(u)];
      }
    }
    return cliques;
  }

  void search(Bits p, int cur) {
    tick_();
    if (best_ >= stop_at_) return;
    // Vertices of degree <= 1 inside p belong to some maximum independent set.
    bool changed = true;
    int pick = -1;
    int pick_degree = -1;
    while (changed) {
      changed = false;
      pick = -1;
      pick_degree = -1;
      for (int v = p.first(); v >= 0; v = p.next(v)) {
        const int deg = p.count_and(adj_[static_cast<std::size_t>(v)]);
        if (deg <= 1) {
          ++cur;
          p.reset(v);
          p.and_not(adj_[static_cast<std::size_t>(v)]);
          changed = true;
          break;
        }
        if (deg > pick_degree) {
          pick = v;
          pick_degree = deg;
        }
      }
    }
    if (pick < 0) {
      if (cur > best_) best_ = cur;
      return;
    }
    if (cur + cover_bound(p) <= best_) return;
    Bits with = p;
    with.reset(pick);
    with.and_not(adj_[static_cast<std::size_t>(pick)]);
    search(std::move(with), cur + 1);
    if (best_ >= stop_at_) return;
    p.reset(pick);
    search(std::move(p), cur);
  }

  std::vector<Bits> adj_;
  std::function<void()> tick_;
  int best_ = 0;
  int stop_at_ = 0;
};

}  // namespace avoid::detail
