#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "monotest/errors.hpp"
#include "monotest/rank_value.hpp"

namespace monotest {

using Point = std::size_t;

/// A total function [n] -> [r], stored densely.
class LineFunction {
 public:
  LineFunction(std::vector<RankValue> values, RankValue range_bound)
      : values_(std::move(values)), range_bound_(std::move(range_bound)) {
    if (values_.empty()) throw DomainError("a line function needs n >= 1");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] < range_bound_)) {
        throw DomainError("value at point " + std::to_string(i) + " is not below the range bound");
      }
    }
  }

  // Range bound defaults to max + 1.
  static LineFunction from_integers(std::span<const std::uint64_t> values) {
    if (values.empty()) throw DomainError("a line function needs n >= 1");
    std::vector<RankValue> out(values.begin(), values.end());
    const auto top = *std::max_element(values.begin(), values.end());
    return LineFunction(std::move(out), RankValue(BigInt(top) + 1));
  }
  static LineFunction from_integers(std::initializer_list<std::uint64_t> values) {
    return from_integers(std::span<const std::uint64_t>(values.begin(), values.size()));
  }

  std::size_t size() const noexcept { return values_.size(); }
  const RankValue& operator[](Point x) const { return values_[x]; }
  const RankValue& at(Point x) const {
    if (x >= values_.size()) throw DomainError("point " + std::to_string(x) + " outside [0, n)");
    return values_[x];
  }
  std::span<const RankValue> values() const noexcept { return values_; }
  const RankValue& range_bound() const noexcept { return range_bound_; }

  friend bool operator==(const LineFunction&, const LineFunction&) = default;

 private:
  std::vector<RankValue> values_;
  RankValue range_bound_;
};

/// A partial function from domain points to values (a decision-tree leaf).
class PartialAssignment {
 public:
  PartialAssignment() = default;
  PartialAssignment(std::initializer_list<std::pair<Point, RankValue>> entries) {
    for (const auto& [x, v] : entries) assign(x, v);
  }

  void assign(Point x, RankValue v) {
    if (!entries_.emplace(x, std::move(v)).second) {
      throw DomainError("point " + std::to_string(x) + " assigned twice");
    }
  }

  std::size_t weight() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::map<Point, RankValue>& entries() const noexcept { return entries_; }

  std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(entries_.size());
    for (const auto& [x, v] : entries_) out.push_back(x);
    return out;
  }

 private:
  std::map<Point, RankValue> entries_;
};

/// The line [n] or the hypergrid [side]^d. Hypergrid points are indexed
/// row-major with the first coordinate most significant; for side = 2^b this
/// is exactly the split of the index into d groups of b bits.
class PosetOrder {
 public:
  enum class Kind { Line, Hypergrid };

  static PosetOrder line(std::size_t n) { return PosetOrder(Kind::Line, n, 1); }
  static PosetOrder hypergrid(std::size_t side, std::size_t dims) {
    if (side == 0 || dims == 0) throw DomainError("hypergrid needs side >= 1 and d >= 1");
    return PosetOrder(Kind::Hypergrid, side, dims);
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t side() const noexcept { return side_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return size_; }

  std::vector<std::size_t> coordinates(Point x) const {
    std::vector<std::size_t> c(dims_);
    for (std::size_t i = dims_; i-- > 0;) {
      c[i] = x % side_;
      x /= side_;
    }
    return c;
  }

  bool less_equal(Point x, Point y) const {
    if (kind_ == Kind::Line) return x <= y;
    for (std::size_t i = 0; i < dims_; ++i) {
      if (x % side_ > y % side_) return false;
      x /= side_;
      y /= side_;
    }
    return true;
  }

 private:
  PosetOrder(Kind kind, std::size_t side, std::size_t dims) : kind_(kind), side_(side), dims_(dims) {
    size_ = 1;
    for (std::size_t i = 0; i < dims; ++i) {
      if (size_ > std::numeric_limits<std::size_t>::max() / side) throw DomainError("hypergrid too large");
      size_ *= side;
    }
  }

  Kind kind_;
  std::size_t side_;
  std::size_t dims_;
  std::size_t size_ = 0;
};

/// x < y in the poset and f(x) > f(y).
struct ViolationPair {
  Point x;
  Point y;

  friend auto operator<=>(const ViolationPair&, const ViolationPair&) = default;
};

inline bool agrees(const LineFunction& f, const PartialAssignment& alpha) {
  for (const auto& [x, v] : alpha.entries()) {
    if (f.at(x) != v) return false;
  }
  return true;
}

// Longest non-decreasing subsequence, patience sorting with upper_bound.
inline std::size_t lnds_length(std::span<const RankValue> values) {
  std::vector<const RankValue*> tails;
  for (const auto& v : values) {
    auto it = std::upper_bound(tails.begin(), tails.end(), &v,
                               [](const RankValue* a, const RankValue* b) { return *a < *b; });
    if (it == tails.end()) {
      tails.push_back(&v);
    } else {
      *it = &v;
    }
  }
  return tails.size();
}

inline std::size_t lnds_length(const LineFunction& f) { return lnds_length(f.values()); }

// Points to change to reach a non-decreasing function, values free in an
// unbounded total order: n - LNDS.
inline std::size_t distance_to_monotone_line(const LineFunction& f) { return f.size() - lnds_length(f); }

inline void check_same_ground_set(const LineFunction& f, const PosetOrder& order) {
  if (f.size() != order.size()) {
    throw DomainError("function has " + std::to_string(f.size()) + " points but the order has " +
                      std::to_string(order.size()));
  }
}

// All violating pairs, sorted by (x, y).
inline std::vector<ViolationPair> violating_pairs(const LineFunction& f, const PosetOrder& order) {
  check_same_ground_set(f, order);
  std::vector<ViolationPair> out;
  const std::size_t n = f.size();
  for (Point x = 0; x < n; ++x) {
    for (Point y = x + 1; y < n; ++y) {
      if (f[x] > f[y] && order.less_equal(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

inline constexpr std::size_t kPosetOracleCap = 24;

namespace detail {

// Minimum vertex cover by branch and bound. Graph given as adjacency bitmasks.
class VertexCoverSearch {
 public:
  explicit VertexCoverSearch(std::vector<std::uint32_t> adjacency)
      : adj_(std::move(adjacency)), best_(static_cast<std::size_t>(adj_.size())) {}

  std::size_t solve() {
    const std::uint32_t all = adj_.empty() ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << adj_.size()) - 1);
    search(all, 0);
    return best_;
  }

 private:
  // Size of a greedy maximal matching among active vertices; every cover needs
  // one endpoint per matched edge.
  std::size_t matching_bound(std::uint32_t active) const {
    std::size_t bound = 0;
    std::uint32_t free = active;
    while (free) {
      const int v = std::countr_zero(free);
      free &= free - 1;
      const std::uint32_t nb = adj_[v] & free;
      if (nb) {
        free &= ~(nb & (~nb + 1));
        ++bound;
      }
    }
    return bound;
  }

  void search(std::uint32_t active, std::size_t taken) {
    if (taken >= best_) return;
    int pick = -1;
    int pick_degree = 0;
    for (std::uint32_t rest = active; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const int degree = std::popcount(adj_[v] & active);
      if (degree > pick_degree) {
        pick = v;
        pick_degree = degree;
      }
    }
    if (pick < 0) {
      best_ = taken;
      return;
    }
    if (taken + matching_bound(active) >= best_) return;
    const std::uint32_t without_pick = active & ~(std::uint32_t{1} << pick);
    search(without_pick, taken + 1);
    const std::uint32_t nb = adj_[pick] & active;
    search(without_pick & ~nb, taken + static_cast<std::size_t>(std::popcount(nb)));
  }

  std::vector<std::uint32_t> adj_;
  std::size_t best_;
};

// Hopcroft-Karp on left = right = [n].
inline std::size_t max_bipartite_matching(const std::vector<std::vector<std::uint32_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> match_left(n, kNone), match_right(n, kNone), dist(n);
  std::vector<std::size_t> cursor(n);

  auto bfs = [&] {
    std::queue<std::uint32_t> q;
    bool reachable_free = false;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (match_left[u] == kNone) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kNone;
      }
    }
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u]) {
        const auto w = match_right[v];
        if (w == kNone) {
          reachable_free = true;
        } else if (dist[w] == kNone) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return reachable_free;
  };

  // Iterative DFS along the BFS layering.
  auto augment = [&](std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      const auto u = stack.back();
      bool advanced = false;
      while (cursor[u] < adj[u].size()) {
        const auto v = adj[u][cursor[u]];
        const auto w = match_right[v];
        if (w == kNone) {
          // Flip the alternating path recorded on the stack.
          auto right = v;
          for (std::size_t i = stack.size(); i-- > 0;) {
            const auto left = stack[i];
            const auto previous = match_left[left];
            match_left[left] = right;
            match_right[right] = left;
            right = previous;
          }
          return true;
        }
        if (dist[w] == dist[u] + 1) {
          stack.push_back(w);
          advanced = true;
          break;
        }
        ++cursor[u];
      }
      if (!advanced) {
        dist[u] = kNone;
        stack.pop_back();
        if (!stack.empty()) ++cursor[stack.back()];
      }
    }
    return false;
  };

  std::size_t matching = 0;
  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (std::uint32_t u = 0; u < n; ++u) {
      if (match_left[u] == kNone && augment(u)) ++matching;
    }
  }
  return matching;
}

}  // namespace detail

/// Exact distance to monotone over a poset: the minimum vertex cover of the
/// violation graph (deleting a cover leaves a violation-free partial function,
/// which extends monotonically into a totally ordered range). Exponential
/// time; ground sets above kPosetOracleCap points are refused.
inline std::size_t distance_to_monotone_poset(const LineFunction& f, const PosetOrder& order) {
  check_same_ground_set(f, order);
  if (f.size() > kPosetOracleCap) {
    throw CapacityError("exact poset distance is limited to " + std::to_string(kPosetOracleCap) + " points");
  }
  std::vector<std::uint32_t> adjacency(f.size(), 0);
  for (const auto& [x, y] : violating_pairs(f, order)) {
    adjacency[x] |= std::uint32_t{1} << y;
    adjacency[y] |= std::uint32_t{1} << x;
  }
  return detail::VertexCoverSearch(std::move(adjacency)).solve();
}

inline constexpr std::size_t kMatchingOracleCap = std::size_t{1} << 14;

/// Same quantity as distance_to_monotone_poset in polynomial time. The
/// relation "x < y and f(x) > f(y)" is a strict partial order, so the violation
/// graph is a comparability graph: its minimum vertex cover is n minus the
/// largest antichain, which equals the maximum matching of the relation's
/// bipartite split graph.
inline std::size_t distance_to_monotone_poset_by_matching(const LineFunction& f, const PosetOrder& order) {
  check_same_ground_set(f, order);
  if (f.size() > kMatchingOracleCap) {
    throw CapacityError("matching oracle is limited to " + std::to_string(kMatchingOracleCap) + " points");
  }
  const std::size_t n = f.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (Point x = 0; x < n; ++x) {
    for (Point y = x + 1; y < n; ++y) {
      if (f[x] > f[y] && order.less_equal(x, y)) adj[x].push_back(static_cast<std::uint32_t>(y));
    }
  }
  return detail::max_bipartite_matching(adj);
}

// Greedy maximal set of pairwise-disjoint violating pairs, scanning pairs in
// (x, y) order. Its size is a lower bound on any poset distance.
inline std::vector<ViolationPair> maximal_disjoint_violations(const LineFunction& f, const PosetOrder& order) {
  check_same_ground_set(f, order);
  std::vector<ViolationPair> out;
  std::vector<bool> used(f.size(), false);
  for (Point x = 0; x < f.size(); ++x) {
    for (Point y = x + 1; y < f.size() && !used[x]; ++y) {
      if (!used[y] && f[x] > f[y] && order.less_equal(x, y)) {
        used[x] = used[y] = true;
        out.push_back({x, y});
      }
    }
  }
  return out;
}

// f'(x) = f(floor(x / factor)) on [n * factor]; distance scales by `factor`.
inline LineFunction inflate_domain(const LineFunction& f, std::size_t factor) {
  if (factor == 0) throw DomainError("inflation factor must be positive");
  std::vector<RankValue> values;
  values.reserve(f.size() * factor);
  for (const auto& v : f.values()) {
    for (std::size_t i = 0; i < factor; ++i) values.push_back(v);
  }
  return LineFunction(std::move(values), f.range_bound());
}

}  // namespace monotest
