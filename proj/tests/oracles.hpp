#pragma once

// Brute-force reference implementations used only by the tests. None of these
// call the library routine they are compared against.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "monotest/monotest.hpp"

namespace monotest::oracle {

// Longest non-decreasing subsequence by trying every subset (n <= 20).
inline std::size_t lnds_by_subsets(const std::vector<std::uint64_t>& v) {
  const std::size_t n = v.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    std::int64_t last = -1;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (mask & (1u << i)) {
        if (static_cast<std::int64_t>(v[i]) < last) ok = false;
        last = static_cast<std::int64_t>(v[i]);
      }
    }
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
  }
  return best;
}

// Distance to monotone on the line through the O(n^2) dynamic program for the
// longest non-decreasing subsequence.
inline std::size_t line_distance_quadratic(const LineFunction& f) {
  const std::size_t n = f.size();
  std::vector<std::size_t> best(n, 1);
  std::size_t longest = 0;
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < y; ++x) {
      if (!(f[x] > f[y])) best[y] = std::max(best[y], best[x] + 1);
    }
    longest = std::max(longest, best[y]);
  }
  return n - longest;
}

// Smallest modification set after which an explicit repair is monotone. Each
// modified point takes the running maximum of values to its left (range
// extended below by -1 when nothing precedes it).
inline std::size_t line_distance_by_repair(const std::vector<std::uint64_t>& v) {
  const std::size_t n = v.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    std::vector<std::int64_t> g(n);
    std::int64_t running = -1;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = (mask & (1u << i)) ? running : static_cast<std::int64_t>(v[i]);
      running = std::max(running, g[i]);
    }
    if (std::is_sorted(g.begin(), g.end())) best = size;
  }
  return best;
}

// Minimum number of points whose removal leaves no comparable inverted pair,
// by enumerating all subsets (ground set <= 20).
inline std::size_t poset_distance_by_subsets(const LineFunction& f, const PosetOrder& order) {
  const std::size_t n = f.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    bool clean = true;
    for (std::size_t x = 0; x < n && clean; ++x) {
      if (mask & (1u << x)) continue;
      for (std::size_t y = 0; y < n && clean; ++y) {
        if (x == y || (mask & (1u << y))) continue;
        const auto cx = order.coordinates(x);
        const auto cy = order.coordinates(y);
        bool below = true;
        for (std::size_t i = 0; i < cx.size(); ++i) below = below && cx[i] <= cy[i];
        if (below && f[x] > f[y]) clean = false;
      }
    }
    if (clean) best = size;
  }
  return best;
}

// Advance a base-(m-1) odometer over seed digits; false after the last seed.
inline bool next_seed(std::vector<Digit>& digits, std::uint32_t m) {
  std::size_t i = digits.size();
  while (i > 0 && digits[i - 1] == m - 2) digits[--i] = 0;
  if (i == 0) return false;
  ++digits[i - 1];
  return true;
}

// Pr[draw agrees with alpha] by enumerating every seed and building each
// function through the recursive (integer) route.
inline Rational agreement_by_seeds(const PartialAssignment& alpha, const MuParams& params,
                                   std::optional<std::size_t> flipped_level) {
  std::vector<Digit> digits(params.prefix_count(), 0);
  std::uint64_t hits = 0, total = 0;
  const std::size_t flip = flipped_level ? (std::size_t{1} << (params.k - 1 - *flipped_level)) : 0;
  do {
    const auto f = mu_from_seed_recursive(params, DigitSeed(params, digits));
    bool ok = true;
    for (const auto& [x, v] : alpha.entries()) ok = ok && f[x ^ flip] == v;
    hits += ok;
    ++total;
  } while (next_seed(digits, params.m));
  return Rational(BigInt(hits), BigInt(total));
}

// Count multiples of 2^i strictly between x and y by listing them.
inline std::size_t multiples_between(std::size_t x, std::size_t y, std::size_t i) {
  std::size_t count = 0;
  for (std::size_t z = x + 1; z < y; ++z) count += (z % (std::size_t{1} << i)) == 0;
  return count;
}

}  // namespace monotest::oracle
