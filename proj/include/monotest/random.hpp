#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "monotest/errors.hpp"

namespace monotest {

// Engine used everywhere. std::mt19937_64 output is fixed by the standard, so
// streams are reproducible across platforms; distributions are implemented
// below rather than taken from <random>, whose algorithms are unspecified.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent per-trial stream: (base_seed, trial) -> splitmix64(splitmix64(base_seed) + trial).
inline Rng derive_stream(std::uint64_t base_seed, std::uint64_t trial) {
  return Rng(splitmix64(splitmix64(base_seed) + trial));
}

// Uniform integer in [0, bound). Rejection sampling keeps it exactly uniform.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw DomainError("uniform_below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw > limit);
  return draw % bound;
}

// `count` distinct values from [0, universe), in the order drawn (partial Fisher-Yates
// over a sparse swap table, so cost is O(count) regardless of universe).
inline std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t universe, std::size_t count) {
  if (count > universe) throw DomainError("sample_distinct: count exceeds universe");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> swapped;  // position -> value
  auto lookup = [&](std::uint64_t pos) {
    for (const auto& [p, v] : swapped) {
      if (p == pos) return v;
    }
    return pos;
  };
  auto store = [&](std::uint64_t pos, std::uint64_t value) {
    for (auto& [p, v] : swapped) {
      if (p == pos) {
        v = value;
        return;
      }
    }
    swapped.emplace_back(pos, value);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + uniform_below(rng, universe - i);
    const std::uint64_t vj = lookup(j);
    store(j, lookup(i));
    out.push_back(vj);
  }
  return out;
}

}  // namespace monotest
