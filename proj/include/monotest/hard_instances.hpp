#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "monotest/errors.hpp"
#include "monotest/function_model.hpp"
#include "monotest/random.hpp"
#include "monotest/rank_value.hpp"

namespace monotest {

/// Domain [2^k], range [m^k]. The lower-bound regime is m = k^3 (see cubic_regime()).
struct MuParams {
  std::size_t k = 1;
  std::uint32_t m = 5;

  MuParams() = default;
  MuParams(std::size_t levels, std::uint32_t base) : k(levels), m(base) { validate(); }

  static MuParams cubic_regime(std::size_t levels) {
    return MuParams(levels, static_cast<std::uint32_t>(levels * levels * levels));
  }

  void validate() const {
    if (k < 1 || k > 40) throw DomainError("k must be in [1, 40]");
    if (m < 2) throw DomainError("digit base m must be at least 2");
  }

  std::size_t domain_size() const { return std::size_t{1} << k; }
  BigInt range_bound() const { return big_pow(m, k); }
  std::size_t prefix_count() const { return domain_size() - 1; }

  friend bool operator==(const MuParams&, const MuParams&) = default;
};

/// l blocks of [2^k], eps = 1/(2l).
struct ScaledParams {
  std::size_t ell = 1;
  MuParams base;

  ScaledParams() = default;
  ScaledParams(std::size_t blocks, MuParams inner) : ell(blocks), base(inner) {
    if (ell < 1) throw DomainError("ell must be at least 1");
  }

  std::size_t domain_size() const { return ell * base.domain_size(); }
  BigInt range_bound() const { return BigInt(ell) * base.range_bound(); }
  Rational epsilon() const { return Rational(1, 2 * static_cast<long long>(ell)); }

  friend bool operator==(const ScaledParams&, const ScaledParams&) = default;
};

/// Index of the binary prefix s (|s| = length, bits = s read as a number) in a
/// heap-ordered table: the empty prefix is 0, then "0", "1", "00", ...
constexpr std::size_t prefix_index(std::size_t length, std::size_t bits) {
  return ((std::size_t{1} << length) - 1) + bits;
}

/// The digit a_s in [0, m-2] for every prefix s with |s| < k.
class DigitSeed {
 public:
  DigitSeed(const MuParams& params, std::vector<Digit> digits) : digits_(std::move(digits)) {
    if (digits_.size() != params.prefix_count()) {
      throw DomainError("seed needs " + std::to_string(params.prefix_count()) + " entries, got " +
                        std::to_string(digits_.size()));
    }
    for (Digit a : digits_) {
      if (a > params.m - 2) throw DomainError("seed digit outside [0, m-2]");
    }
  }

  static DigitSeed random(const MuParams& params, Rng& rng) {
    std::vector<Digit> digits(params.prefix_count());
    for (auto& a : digits) a = static_cast<Digit>(uniform_below(rng, params.m - 1));
    return DigitSeed(params, std::move(digits));
  }

  Digit at(std::size_t length, std::size_t bits) const { return digits_[prefix_index(length, bits)]; }
  std::size_t size() const noexcept { return digits_.size(); }
  const std::vector<Digit>& raw() const noexcept { return digits_; }

 private:
  std::vector<Digit> digits_;
};

// The k base-m digits of mu's function at x: digit i is a_{x's i-bit prefix} + bit i of x.
inline DigitString mu_digits(const MuParams& params, const DigitSeed& seed, std::size_t x) {
  DigitString d(params.k);
  for (std::size_t i = 0; i < params.k; ++i) {
    const std::size_t shift = params.k - i;
    const std::size_t prefix = x >> shift;
    const std::size_t bit = (x >> (shift - 1)) & 1u;
    d[i] = seed.at(i, prefix) + static_cast<Digit>(bit);
  }
  return d;
}

inline void check_seed(const MuParams& params, const DigitSeed& seed) {
  if (seed.size() != params.prefix_count()) throw DomainError("seed does not match parameters");
}

/// Digit-wise construction of the monotone hard instance.
inline LineFunction mu_from_seed(const MuParams& params, const DigitSeed& seed) {
  check_seed(params, seed);
  std::vector<RankValue> values;
  values.reserve(params.domain_size());
  for (std::size_t x = 0; x < params.domain_size(); ++x) {
    values.push_back(RankValue::from_digits(params.m, mu_digits(params, seed, x)));
  }
  return LineFunction(std::move(values), RankValue(params.range_bound()));
}

/// Same function built bottom-up with integer arithmetic:
///   f = a m^i + f0 on [0, 2^i),  f = (a+1) m^i + f1(x - 2^i) on [2^i, 2^{i+1}),
/// where the split at depth i below prefix s uses a = a_s.
inline LineFunction mu_from_seed_recursive(const MuParams& params, const DigitSeed& seed) {
  check_seed(params, seed);
  std::vector<BigInt> powers(params.k + 1);
  powers[0] = 1;
  for (std::size_t i = 1; i <= params.k; ++i) powers[i] = powers[i - 1] * params.m;

  std::function<std::vector<BigInt>(std::size_t, std::size_t)> build =
      [&](std::size_t length, std::size_t bits) -> std::vector<BigInt> {
    if (length == params.k) return {BigInt(0)};
    const std::size_t depth = params.k - length - 1;
    auto lower = build(length + 1, bits << 1);
    auto upper = build(length + 1, (bits << 1) | 1u);
    const BigInt a = seed.at(length, bits);
    std::vector<BigInt> out;
    out.reserve(lower.size() * 2);
    for (auto& v : lower) out.push_back(a * powers[depth] + v);
    for (auto& v : upper) out.push_back((a + 1) * powers[depth] + v);
    return out;
  };

  std::vector<RankValue> values;
  for (auto& v : build(0, 0)) values.emplace_back(std::move(v));
  return LineFunction(std::move(values), RankValue(powers[params.k]));
}

inline void check_level(const MuParams& params, std::size_t j) {
  if (j >= params.k) throw DomainError("level j must be in [0, k)");
}

/// g(x) = f(x XOR 2^{k-1-j}) for f = mu_from_seed(seed): level j's bit is flipped.
inline LineFunction nu_j_from_seed(const MuParams& params, const DigitSeed& seed, std::size_t j) {
  check_seed(params, seed);
  check_level(params, j);
  const std::size_t flip = std::size_t{1} << (params.k - 1 - j);
  std::vector<RankValue> values;
  values.reserve(params.domain_size());
  for (std::size_t x = 0; x < params.domain_size(); ++x) {
    values.push_back(RankValue::from_digits(params.m, mu_digits(params, seed, x ^ flip)));
  }
  return LineFunction(std::move(values), RankValue(params.range_bound()));
}

/// Which hard distribution to draw from.
struct DistributionId {
  enum class Tag { Mu, NuJ, Nu, MuTilde, NuTildeTJ, NuTilde };

  Tag tag = Tag::Mu;
  std::size_t t = 0;
  std::size_t j = 0;

  static DistributionId mu() { return {Tag::Mu, 0, 0}; }
  static DistributionId nu_j(std::size_t level) { return {Tag::NuJ, 0, level}; }
  static DistributionId nu() { return {Tag::Nu, 0, 0}; }
  static DistributionId mu_tilde() { return {Tag::MuTilde, 0, 0}; }
  static DistributionId nu_tilde_tj(std::size_t block, std::size_t level) { return {Tag::NuTildeTJ, block, level}; }
  static DistributionId nu_tilde() { return {Tag::NuTilde, 0, 0}; }

  bool is_scaled() const { return tag == Tag::MuTilde || tag == Tag::NuTildeTJ || tag == Tag::NuTilde; }
  bool is_monotone() const { return tag == Tag::Mu || tag == Tag::MuTilde; }

  // Number of equally weighted components in the mixture.
  std::size_t mixture_size(const ScaledParams& params) const {
    switch (tag) {
      case Tag::Nu: return params.base.k;
      case Tag::NuTilde: return params.ell * params.base.k;
      default: return 1;
    }
  }

  void validate(const ScaledParams& params) const {
    if (!is_scaled() && params.ell != 1) throw DomainError("unscaled distributions need ell = 1");
    if (tag == Tag::NuJ || tag == Tag::NuTildeTJ) check_level(params.base, j);
    if (tag == Tag::NuTildeTJ && t >= params.ell) throw DomainError("block t must be in [0, ell)");
  }

  // "mu", "nu", "nu-j:<j>", "mu-tilde", "nu-tilde", "nu-tilde:<t>:<j>".
  std::string name() const {
    switch (tag) {
      case Tag::Mu: return "mu";
      case Tag::NuJ: return "nu-j:" + std::to_string(j);
      case Tag::Nu: return "nu";
      case Tag::MuTilde: return "mu-tilde";
      case Tag::NuTildeTJ: return "nu-tilde:" + std::to_string(t) + ":" + std::to_string(j);
      case Tag::NuTilde: return "nu-tilde";
    }
    return {};
  }

  static DistributionId parse(std::string_view text) {
    auto number = [&](std::string_view s) {
      if (s.empty()) throw DomainError("bad distribution name: " + std::string(text));
      std::size_t v = 0;
      for (char c : s) {
        if (c < '0' || c > '9') throw DomainError("bad distribution name: " + std::string(text));
        v = v * 10 + static_cast<std::size_t>(c - '0');
      }
      return v;
    };
    if (text == "mu") return mu();
    if (text == "nu") return nu();
    if (text == "mu-tilde") return mu_tilde();
    if (text == "nu-tilde") return nu_tilde();
    if (text.starts_with("nu-j:")) return nu_j(number(text.substr(5)));
    if (text.starts_with("nu-tilde:")) {
      const auto rest = text.substr(9);
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw DomainError("bad distribution name: " + std::string(text));
      return nu_tilde_tj(number(rest.substr(0, colon)), number(rest.substr(colon + 1)));
    }
    throw DomainError("unknown distribution: " + std::string(text));
  }

  friend bool operator==(const DistributionId&, const DistributionId&) = default;
};

namespace detail {

// Base-m digits of s, as few as possible (at least one).
inline DigitString block_prefix_digits(std::size_t block, std::size_t ell, std::uint32_t m) {
  std::size_t width = 1;
  for (std::size_t top = ell - 1; top >= m; top /= m) ++width;
  return *integer_to_digits(BigInt(block), m, width);
}

// One block per seed; `flipped` marks the block sampled from nu^j instead of mu.
inline LineFunction assemble_blocks(const ScaledParams& params, const std::vector<DigitSeed>& seeds,
                                    std::optional<std::pair<std::size_t, std::size_t>> flipped) {
  const auto& base = params.base;
  std::vector<RankValue> values;
  values.reserve(params.domain_size());
  for (std::size_t s = 0; s < params.ell; ++s) {
    const auto head = block_prefix_digits(s, params.ell, base.m);
    std::size_t flip = 0;
    if (flipped && flipped->first == s) flip = std::size_t{1} << (base.k - 1 - flipped->second);
    for (std::size_t x = 0; x < base.domain_size(); ++x) {
      DigitString d = head;
      const auto tail = mu_digits(base, seeds[s], x ^ flip);
      d.insert(d.end(), tail.begin(), tail.end());
      values.push_back(RankValue::from_digits(base.m, std::move(d)));
    }
  }
  return LineFunction(std::move(values), RankValue(params.range_bound()));
}

}  // namespace detail

/// f(s 2^k + x) = s m^k + f_s(x) with f_s from mu, except block `flipped.first`
/// which comes from nu^{flipped.second} when given.
inline LineFunction scaled_from_seeds(const ScaledParams& params, const std::vector<DigitSeed>& seeds,
                                      std::optional<std::pair<std::size_t, std::size_t>> flipped = std::nullopt) {
  if (seeds.size() != params.ell) throw DomainError("need one seed per block");
  for (const auto& s : seeds) check_seed(params.base, s);
  if (flipped) {
    if (flipped->first >= params.ell) throw DomainError("block t must be in [0, ell)");
    check_level(params.base, flipped->second);
  }
  return detail::assemble_blocks(params, seeds, flipped);
}

/// Draw from a hard distribution. Mixtures pick their component first, then seeds.
inline LineFunction sample(const DistributionId& dist, const ScaledParams& params, Rng& rng) {
  dist.validate(params);
  using Tag = DistributionId::Tag;
  const auto& base = params.base;
  switch (dist.tag) {
    case Tag::Mu: return mu_from_seed(base, DigitSeed::random(base, rng));
    case Tag::NuJ: return nu_j_from_seed(base, DigitSeed::random(base, rng), dist.j);
    case Tag::Nu: {
      const auto j = static_cast<std::size_t>(uniform_below(rng, base.k));
      return nu_j_from_seed(base, DigitSeed::random(base, rng), j);
    }
    case Tag::MuTilde:
    case Tag::NuTildeTJ:
    case Tag::NuTilde: {
      std::optional<std::pair<std::size_t, std::size_t>> flipped;
      if (dist.tag == Tag::NuTildeTJ) flipped = {{dist.t, dist.j}};
      if (dist.tag == Tag::NuTilde) {
        const auto pick = static_cast<std::size_t>(uniform_below(rng, params.ell * base.k));
        flipped = {{pick / base.k, pick % base.k}};
      }
      std::vector<DigitSeed> seeds;
      seeds.reserve(params.ell);
      for (std::size_t s = 0; s < params.ell; ++s) seeds.push_back(DigitSeed::random(base, rng));
      return detail::assemble_blocks(params, seeds, flipped);
    }
  }
  throw DomainError("unknown distribution");
}

inline LineFunction sample(const DistributionId& dist, const MuParams& params, Rng& rng) {
  return sample(dist, ScaledParams(1, params), rng);
}

namespace detail {

// Pr[mu-style draw agrees with alpha] on one block of [2^k], with the points of
// alpha pre-composed with `flip` (0 for mu, 2^{k-1-j} for nu^j). Each assigned
// point pins a_s = digit_i - bit_i along its prefix path; the probability is
// (1/(m-1))^{#pinned prefixes}, or 0 on a conflict or a pin outside [0, m-2].
inline Rational block_agreement(const MuParams& params,
                                const std::vector<std::pair<std::size_t, DigitString>>& points,
                                std::size_t flip) {
  if (points.empty()) return Rational(1);
  std::map<std::size_t, Digit> pinned;
  for (const auto& [x, digits] : points) {
    const std::size_t xs = x ^ flip;
    for (std::size_t i = 0; i < params.k; ++i) {
      const std::size_t shift = params.k - i;
      const std::size_t bit = (xs >> (shift - 1)) & 1u;
      if (digits[i] < bit) return Rational(0);
      const Digit a = digits[i] - static_cast<Digit>(bit);
      if (a > params.m - 2) return Rational(0);
      const auto [it, inserted] = pinned.emplace(prefix_index(i, xs >> shift), a);
      if (!inserted && it->second != a) return Rational(0);
    }
  }
  const BigInt denominator = big_pow(params.m - 1, pinned.size());
  return Rational(BigInt(1), denominator);
}

}  // namespace detail

/// Exact probability that a draw from `dist` agrees with alpha.
inline Rational agreement_probability(const PartialAssignment& alpha, const DistributionId& dist,
                                      const ScaledParams& params) {
  dist.validate(params);
  const auto& base = params.base;
  const std::size_t block_size = base.domain_size();
  const BigInt block_range = base.range_bound();

  // Split alpha into per-block sub-assignments of k-digit values.
  std::vector<std::vector<std::pair<std::size_t, DigitString>>> blocks(params.ell);
  for (const auto& [p, v] : alpha.entries()) {
    if (p >= params.domain_size()) throw DomainError("assignment point outside the domain");
    const std::size_t s = p / block_size;
    const BigInt value = v.to_integer();
    const BigInt offset = BigInt(s) * block_range;
    if (value < offset || value >= offset + block_range) return Rational(0);
    auto digits = integer_to_digits(value - offset, base.m, base.k);
    blocks[s].emplace_back(p % block_size, std::move(*digits));
  }

  auto flip_of = [&](std::size_t j) { return std::size_t{1} << (base.k - 1 - j); };
  auto product = [&](std::optional<std::pair<std::size_t, std::size_t>> flipped) {
    Rational total(1);
    for (std::size_t s = 0; s < params.ell && total != 0; ++s) {
      const std::size_t flip = (flipped && flipped->first == s) ? flip_of(flipped->second) : 0;
      total *= detail::block_agreement(base, blocks[s], flip);
    }
    return total;
  };

  using Tag = DistributionId::Tag;
  switch (dist.tag) {
    case Tag::Mu:
    case Tag::MuTilde: return product(std::nullopt);
    case Tag::NuJ: return product({{0, dist.j}});
    case Tag::NuTildeTJ: return product({{dist.t, dist.j}});
    case Tag::Nu:
    case Tag::NuTilde: {
      Rational sum(0);
      const std::size_t blocks_to_flip = dist.tag == Tag::Nu ? 1 : params.ell;
      for (std::size_t t = 0; t < blocks_to_flip; ++t) {
        for (std::size_t j = 0; j < base.k; ++j) sum += product({{t, j}});
      }
      return sum / Rational(static_cast<long long>(blocks_to_flip * base.k));
    }
  }
  return Rational(0);
}

inline Rational agreement_probability(const PartialAssignment& alpha, const DistributionId& dist,
                                      const MuParams& params) {
  return agreement_probability(alpha, dist, ScaledParams(1, params));
}

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// Number of weighted functions a full enumeration of `dist` produces; nullopt
// if it overflows 64 bits.
inline std::optional<std::uint64_t> enumeration_size(const DistributionId& dist, const ScaledParams& params) {
  const BigInt seeds = big_pow(params.base.m - 1, params.ell * params.base.prefix_count());
  const BigInt total = seeds * dist.mixture_size(params);
  if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return total.convert_to<std::uint64_t>();
}

/// Visit every (function, weight) in the support of `dist`, seed tuples in
/// lexicographic order within each mixture component.
template <typename Visitor>
void for_each_in_distribution(const DistributionId& dist, const ScaledParams& params, Visitor&& visit) {
  dist.validate(params);
  const auto size = enumeration_size(dist, params);
  if (!size || *size > kEnumerationCap) {
    throw CapacityError("distribution support exceeds the enumeration cap of 10^7 functions");
  }
  const auto& base = params.base;
  const std::size_t per_seed = base.prefix_count();
  const std::size_t slots = per_seed * params.ell;
  const Rational weight(BigInt(1), BigInt(*size));

  using Tag = DistributionId::Tag;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> components;
  switch (dist.tag) {
    case Tag::Mu:
    case Tag::MuTilde: components.push_back(std::nullopt); break;
    case Tag::NuJ: components.push_back({{0, dist.j}}); break;
    case Tag::NuTildeTJ: components.push_back({{dist.t, dist.j}}); break;
    case Tag::Nu:
      for (std::size_t j = 0; j < base.k; ++j) components.push_back({{0, j}});
      break;
    case Tag::NuTilde:
      for (std::size_t t = 0; t < params.ell; ++t)
        for (std::size_t j = 0; j < base.k; ++j) components.push_back({{t, j}});
      break;
  }

  for (const auto& component : components) {
    std::vector<Digit> odometer(slots, 0);
    while (true) {
      std::vector<DigitSeed> seeds;
      seeds.reserve(params.ell);
      for (std::size_t s = 0; s < params.ell; ++s) {
        seeds.emplace_back(base, std::vector<Digit>(odometer.begin() + static_cast<std::ptrdiff_t>(s * per_seed),
                                                    odometer.begin() + static_cast<std::ptrdiff_t>((s + 1) * per_seed)));
      }
      visit(detail::assemble_blocks(params, seeds, component), weight);
      std::size_t i = slots;
      while (i > 0 && odometer[i - 1] == base.m - 2) odometer[--i] = 0;
      if (i == 0) break;
      ++odometer[i - 1];
    }
  }
}

/// Full support with exact weights (summing to 1). Functions reachable through
/// several seeds or mixture components appear once per route.
inline std::vector<std::pair<LineFunction, Rational>> enumerate_distribution(const DistributionId& dist,
                                                                             const ScaledParams& params) {
  std::vector<std::pair<LineFunction, Rational>> out;
  for_each_in_distribution(dist, params, [&](LineFunction f, const Rational& w) { out.emplace_back(std::move(f), w); });
  return out;
}

inline std::vector<std::pair<LineFunction, Rational>> enumerate_distribution(const DistributionId& dist,
                                                                             const MuParams& params) {
  return enumerate_distribution(dist, ScaledParams(1, params));
}

/// Hypergrid coordinates of x: d groups of b bits, most significant group first.
inline std::vector<std::size_t> grid_point(std::size_t x, std::size_t d, std::size_t b) {
  if (d == 0 || b == 0 || d * b >= 64) throw DomainError("grid_point needs d, b >= 1 and d*b < 64");
  if (x >> (d * b)) throw DomainError("grid_point: x outside [0, 2^{d b})");
  std::vector<std::size_t> out(d);
  const std::size_t mask = (std::size_t{1} << b) - 1;
  for (std::size_t i = 0; i < d; ++i) out[i] = (x >> ((d - 1 - i) * b)) & mask;
  return out;
}

/// The order under which a function on [2^{d b}] is read as a function on [2^b]^d.
inline PosetOrder regrouped_order(std::size_t d, std::size_t b) {
  if (d == 0 || b == 0 || d * b >= 64) throw DomainError("regrouping needs d, b >= 1 and d*b < 64");
  return d == 1 ? PosetOrder::line(std::size_t{1} << b) : PosetOrder::hypergrid(std::size_t{1} << b, d);
}

}  // namespace monotest
