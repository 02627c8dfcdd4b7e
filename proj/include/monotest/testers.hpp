#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "monotest/errors.hpp"
#include "monotest/function_model.hpp"
#include "monotest/random.hpp"
#include "monotest/rank_value.hpp"

namespace monotest {

// Thrown by a QueryOracle with a budget once the budget is spent.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("query budget exhausted") {}
};

/// Query access to a LineFunction for a single tester run. With memoization
/// (the default) each distinct point is counted once; otherwise every call
/// counts. The transcript holds exactly the counted queries.
class QueryOracle {
 public:
  explicit QueryOracle(const LineFunction& f, bool memoize = true,
                       std::optional<std::size_t> budget = std::nullopt)
      : f_(&f), memoize_(memoize), budget_(budget) {}

  const RankValue& query(Point x) {
    const RankValue& v = f_->at(x);
    if (memoize_ && seen_.contains(x)) return v;
    if (budget_ && transcript_.size() >= *budget_) throw BudgetExhausted();
    if (memoize_) seen_.insert(x);
    transcript_.emplace_back(x, v);
    return v;
  }

  std::size_t size() const noexcept { return f_->size(); }
  std::size_t queries() const noexcept { return transcript_.size(); }
  const std::vector<std::pair<Point, RankValue>>& transcript() const noexcept { return transcript_; }

 private:
  const LineFunction* f_;
  bool memoize_;
  std::optional<std::size_t> budget_;
  std::unordered_set<Point> seen_;
  std::vector<std::pair<Point, RankValue>> transcript_;
};

struct TesterConfig {
  Rational epsilon{1, 2};
  std::uint32_t c = 6;  // iterations = ceil(c / eps)
  std::uint64_t seed = 0;
};

enum class Verdict { Accept, Reject };

inline const char* to_string(Verdict v) { return v == Verdict::Accept ? "accept" : "reject"; }

struct TesterReport {
  Verdict verdict = Verdict::Accept;
  std::size_t queries = 0;
  std::optional<ViolationPair> witness;
  std::vector<std::pair<Point, RankValue>> transcript;
};

namespace detail {

inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

inline void check_epsilon(const Rational& eps) {
  if (eps <= 0 || eps > 1) throw ConfigError("epsilon must lie in (0, 1]");
}

inline TesterReport finish(const QueryOracle& oracle, std::optional<ViolationPair> witness) {
  TesterReport r;
  r.verdict = witness ? Verdict::Reject : Verdict::Accept;
  r.queries = oracle.queries();
  r.witness = witness;
  r.transcript = oracle.transcript();
  return r;
}

}  // namespace detail

// ceil(c / eps).
inline std::size_t tester_iterations(const TesterConfig& config) {
  detail::check_epsilon(config.epsilon);
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt r = detail::ceil_div(BigInt(config.c) * denominator(config.epsilon), numerator(config.epsilon));
  return r.convert_to<std::size_t>();
}

// ceil(log2(eps * n)); requires eps * n >= 2.
inline std::size_t improved_levels(const Rational& eps, std::size_t n) {
  detail::check_epsilon(eps);
  const Rational scaled = eps * Rational(BigInt(n));
  if (scaled < 2) {
    throw ConfigError("eps * n < 2: the log-scheme tester does not apply, use the exhaustive tester");
  }
  std::size_t levels = 0;
  while (Rational(big_pow(2, levels)) < scaled) ++levels;
  return levels;
}

// ceil(c / eps) * (1 + 2 (ceil(log2(eps n)) + 1)); worst case without memoization.
inline std::size_t improved_query_budget(const TesterConfig& config, std::size_t n) {
  return tester_iterations(config) * (1 + 2 * (improved_levels(config.epsilon, n) + 1));
}

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

inline std::size_t ergun_query_budget(const TesterConfig& config, std::size_t n) {
  return tester_iterations(config) * (ceil_log2(n) + 1);
}

/// One iteration of the improved tester with the random point fixed to x:
/// compare f(x) against the nearest multiples of 2^i on either side for
/// i = 0..levels, skipping neighbours outside [0, n).
inline std::optional<ViolationPair> probe_point(QueryOracle& oracle, Point x, std::size_t levels) {
  const std::size_t n = oracle.size();
  const RankValue fx = oracle.query(x);
  for (std::size_t i = 0; i <= levels && i < 64; ++i) {
    if (x > 0) {
      const Point w = ((x - 1) >> i) << i;
      if (oracle.query(w) > fx) return ViolationPair{w, x};
    }
    const std::size_t step = (x >> i) + 1;
    if (i < 63 && step <= ((n - 1) >> i)) {
      const Point y = step << i;
      if (fx > oracle.query(y)) return ViolationPair{x, y};
    }
  }
  return std::nullopt;
}

/// Non-adaptive 1-sided tester with O(log(eps n) / eps) queries.
inline TesterReport test_improved(QueryOracle& oracle, const TesterConfig& config, Rng& rng) {
  const std::size_t n = oracle.size();
  const std::size_t levels = improved_levels(config.epsilon, n);
  const std::size_t rounds = tester_iterations(config);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto x = static_cast<Point>(uniform_below(rng, n));
    if (auto witness = probe_point(oracle, x, levels)) return detail::finish(oracle, witness);
  }
  return detail::finish(oracle, std::nullopt);
}

inline TesterReport test_improved(QueryOracle& oracle, const TesterConfig& config) {
  Rng rng = derive_stream(config.seed, 0);
  return test_improved(oracle, config, rng);
}

/// Classic binary-search spot checker (baseline; not the improved scheme).
/// Each round searches for the key (f(x), x) as if the keys were sorted and
/// rejects the moment the search interval stops containing x. Ties in f are
/// broken by position, so every non-decreasing f is accepted.
inline TesterReport test_ergun(QueryOracle& oracle, const TesterConfig& config, Rng& rng) {
  const std::size_t n = oracle.size();
  const std::size_t rounds = tester_iterations(config);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto x = static_cast<Point>(uniform_below(rng, n));
    const RankValue fx = oracle.query(x);
    std::size_t lo = 0;
    std::size_t hi = n;  // lower_bound lies in [lo, hi]
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (mid == x) {
        hi = mid;
        continue;
      }
      const RankValue& fm = oracle.query(mid);
      const bool below = fm < fx || (fm == fx && mid < x);
      if (below) {
        lo = mid + 1;
        if (lo > x) return detail::finish(oracle, ViolationPair{x, mid});
      } else {
        hi = mid;
        if (hi < x) return detail::finish(oracle, ViolationPair{mid, x});
      }
    }
  }
  return detail::finish(oracle, std::nullopt);
}

inline TesterReport test_ergun(QueryOracle& oracle, const TesterConfig& config) {
  Rng rng = derive_stream(config.seed, 0);
  return test_ergun(oracle, config, rng);
}

/// Reads every point; rejects on the first adjacent inversion.
inline TesterReport test_exhaustive(QueryOracle& oracle) {
  const std::size_t n = oracle.size();
  RankValue previous = oracle.query(0);
  for (Point x = 1; x < n; ++x) {
    RankValue current = oracle.query(x);
    if (previous > current) return detail::finish(oracle, ViolationPair{x - 1, x});
    previous = std::move(current);
  }
  return detail::finish(oracle, std::nullopt);
}

/// Repeatedly removes neighbouring x < y (neighbours among the survivors)
/// with f(x) > f(y), stopping after `limit` pairs. A single left-to-right pass
/// with a stack of survivors performs exactly these removals; when the pass
/// ends the survivors are non-decreasing, so the result is maximal.
inline std::vector<ViolationPair> greedy_neighbor_pairs(const LineFunction& f,
                                                        std::size_t limit = static_cast<std::size_t>(-1)) {
  std::vector<ViolationPair> pairs;
  std::vector<Point> survivors;
  for (Point y = 0; y < f.size() && pairs.size() < limit; ++y) {
    if (!survivors.empty() && f[survivors.back()] > f[y]) {
      pairs.push_back({survivors.back(), y});
      survivors.pop_back();
    } else {
      survivors.push_back(y);
    }
  }
  return pairs;
}

/// floor(eps n / 2) disjoint violating pairs with y - x <= eps n, which exist
/// whenever f is eps-far from monotone.
inline std::vector<ViolationPair> find_disjoint_violating_pairs(const LineFunction& f, const Rational& eps) {
  detail::check_epsilon(eps);
  const Rational half = eps * Rational(BigInt(f.size())) / 2;
  const auto wanted = static_cast<std::size_t>(
      (boost::multiprecision::numerator(half) / boost::multiprecision::denominator(half)).convert_to<std::uint64_t>());
  auto pairs = greedy_neighbor_pairs(f, wanted);
  if (pairs.size() < wanted) {
    throw CertificateError("greedy procedure stalled after " + std::to_string(pairs.size()) + " of " +
                           std::to_string(wanted) + " pairs: f is not eps-far from monotone");
  }
  return pairs;
}

/// Smallest i such that exactly one multiple of 2^i lies strictly between x and y.
inline std::size_t split_level(std::size_t x, std::size_t y) {
  if (y < x + 2) throw DomainError("split_level needs y >= x + 2");
  for (std::size_t i = 0;; ++i) {
    const std::size_t count = ((y - 1) >> i) - (x >> i);
    if (count == 1) return i;
  }
}

}  // namespace monotest
