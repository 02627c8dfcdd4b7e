#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "monotest/errors.hpp"
#include "monotest/function_model.hpp"
#include "monotest/hard_instances.hpp"
#include "monotest/random.hpp"
#include "monotest/rank_value.hpp"
#include "monotest/testers.hpp"

namespace monotest {

enum class ValueClass { Good, Bad };

/// Good iff all k base-m digits (leading zeros included) lie in [1, m-2].
inline ValueClass classify_value(const RankValue& v, std::size_t k, std::uint32_t m) {
  const auto digits = v.digits(m, k);
  if (!digits) throw DomainError("value is not below m^k");
  for (Digit d : *digits) {
    if (d == 0 || d == m - 1) return ValueClass::Bad;
  }
  return ValueClass::Good;
}

inline bool is_good_assignment(const PartialAssignment& alpha, std::size_t k, std::uint32_t m) {
  for (const auto& [x, v] : alpha.entries()) {
    if (classify_value(v, k, m) == ValueClass::Bad) return false;
  }
  return true;
}

struct CutEdge {
  std::size_t index;  // the cut index j
  Point x;
  Point y;
};

struct CutReport {
  std::size_t weight = 0;
  std::vector<std::size_t> cut;  // sorted
  std::vector<CutEdge> edges;    // one witness pair per cut index
  bool acyclic = true;

  bool cuts(std::size_t j) const { return std::binary_search(cut.begin(), cut.end(), j); }
};

/// A pair x < y cuts j when they share the first j bits (of k) and differ at bit j.
inline CutReport cut_indices(std::vector<Point> points, std::size_t k) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (Point p : points) {
    if (k < 64 && (p >> k) != 0) throw DomainError("point outside [0, 2^k)");
  }
  CutReport report;
  report.weight = points.size();
  std::map<std::size_t, CutEdge> first_witness;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const auto diff = static_cast<std::uint64_t>(points[a] ^ points[b]);
      const std::size_t j = k - static_cast<std::size_t>(std::bit_width(diff));
      first_witness.try_emplace(j, CutEdge{j, points[a], points[b]});
    }
  }
  for (const auto& [j, edge] : first_witness) {
    report.cut.push_back(j);
    report.edges.push_back(edge);
  }

  // Union-find over the witness graph.
  std::map<Point, Point> parent;
  for (Point p : points) parent[p] = p;
  std::function<Point(Point)> root = [&](Point p) { return parent[p] == p ? p : parent[p] = root(parent[p]); };
  for (const auto& e : report.edges) {
    const Point rx = root(e.x);
    const Point ry = root(e.y);
    if (rx == ry) {
      report.acyclic = false;
    } else {
      parent[rx] = ry;
    }
  }
  return report;
}

inline CutReport cut_indices(const PartialAssignment& alpha, std::size_t k) { return cut_indices(alpha.points(), k); }

/// t points {0, 2^{k-1}, ..., 2^{k-t+1}}: each new point cuts one more index,
/// so t points cut exactly t - 1 indices.
inline std::vector<Point> tight_cut_witness(std::size_t k, std::size_t t) {
  if (t < 1 || t > k) throw DomainError("tight witness needs 1 <= t <= k");
  std::vector<Point> points{0};
  for (std::size_t i = 1; i < t; ++i) points.push_back(std::size_t{1} << (k - i));
  return points;
}

enum class CheckOutcome { Verified, Counterexample, Skipped };

inline const char* to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Verified: return "verified";
    case CheckOutcome::Counterexample: return "counterexample";
    case CheckOutcome::Skipped: return "skipped";
  }
  return "";
}

struct LemmaCheckResult {
  std::string lemma;
  std::map<std::string, std::string> parameters;
  CheckOutcome outcome = CheckOutcome::Verified;
  std::size_t cases = 0;
  std::string detail;  // counterexample payload or skip reason
  bool informative = true;

  void fail(std::string payload) {
    if (outcome != CheckOutcome::Counterexample) {
      outcome = CheckOutcome::Counterexample;
      detail = std::move(payload);
    }
  }
};

namespace detail {

inline std::string describe_points(const std::vector<Point>& points) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < points.size(); ++i) os << (i ? "," : "") << points[i];
  os << "}";
  return os.str();
}

inline std::string describe(const PartialAssignment& alpha) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [x, v] : alpha.entries()) {
    os << (first ? "" : ",") << x << "->" << v.to_string();
    first = false;
  }
  os << "}";
  return os.str();
}

inline void check_one_cut_set(LemmaCheckResult& result, const std::vector<Point>& points, std::size_t k) {
  const auto report = cut_indices(points, k);
  ++result.cases;
  if (report.cut.size() + 1 > std::max<std::size_t>(report.weight, 1) || !report.acyclic) {
    result.fail("points " + describe_points(points) + " cut " + std::to_string(report.cut.size()) + " indices" +
                (report.acyclic ? "" : " with a cyclic witness graph"));
  }
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    out = out * (n - r + i) / i;
    if (out > (std::uint64_t{1} << 40)) return out;
  }
  return out;
}

// Visit all r-subsets of [n] in lexicographic order.
template <typename Visitor>
void for_each_subset(std::size_t n, std::size_t r, Visitor&& visit) {
  if (r > n) return;
  std::vector<Point> idx(r);
  std::iota(idx.begin(), idx.end(), Point{0});
  while (true) {
    visit(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline constexpr std::uint64_t kExhaustiveSubsetCap = 10'000'000;

/// Weight-t point sets cut at most t - 1 indices and their witness graph is a
/// forest. Runs every t-subset when 2^k <= 16 (or `force_exhaustive`), then
/// `trials` random t-subsets.
inline LemmaCheckResult check_cut_lemma(std::size_t k, std::size_t weight, std::size_t trials, Rng& rng,
                                        bool force_exhaustive = false) {
  LemmaCheckResult result;
  result.lemma = "cut";
  result.parameters = {{"k", std::to_string(k)}, {"weight", std::to_string(weight)}};
  if (k == 0 || k >= 63) throw DomainError("k must be in [1, 62]");
  const std::size_t domain = std::size_t{1} << k;
  if (weight < 1 || weight > domain) throw DomainError("weight must be in [1, 2^k]");
  const bool exhaustive = domain <= 16 || force_exhaustive;
  if (exhaustive) {
    if (detail::binomial(domain, weight) > kExhaustiveSubsetCap) {
      throw CapacityError("too many point sets for exhaustive checking");
    }
    detail::for_each_subset(domain, weight,
                            [&](const std::vector<Point>& s) { detail::check_one_cut_set(result, s, k); });
  }
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto drawn = sample_distinct(rng, domain, weight);
    detail::check_one_cut_set(result, std::vector<Point>(drawn.begin(), drawn.end()), k);
  }
  result.parameters["exhaustive"] = exhaustive ? "true" : "false";
  return result;
}

// The witnesses {0, 2^{k-1}, ..., 2^{k-t+1}} cut exactly t - 1 indices, for every t in [1, k].
inline LemmaCheckResult check_cut_tightness(std::size_t k) {
  LemmaCheckResult result;
  result.lemma = "cut-tight";
  result.parameters = {{"k", std::to_string(k)}};
  for (std::size_t t = 1; t <= k; ++t) {
    ++result.cases;
    const auto report = cut_indices(tight_cut_witness(k, t), k);
    if (report.cut.size() != t - 1 || !report.acyclic) {
      result.fail("witness of size " + std::to_string(t) + " cuts " + std::to_string(report.cut.size()) + " indices");
    }
  }
  return result;
}

// Values of a random draw from mu or a random nu^j at `weight` random points,
// or nullopt when some drawn value is bad.
inline std::optional<PartialAssignment> random_good_assignment(const MuParams& params, std::size_t weight, Rng& rng) {
  const auto seed = DigitSeed::random(params, rng);
  const auto j = static_cast<std::size_t>(uniform_below(rng, params.k));
  const auto f = uniform_below(rng, 2) ? mu_from_seed(params, seed) : nu_j_from_seed(params, seed, j);
  PartialAssignment alpha;
  for (auto x : sample_distinct(rng, params.domain_size(), weight)) alpha.assign(x, f[x]);
  if (!is_good_assignment(alpha, params.k, params.m)) return std::nullopt;
  return alpha;
}

namespace detail {

// Seed enumeration is feasible for one unscaled component.
inline bool seeds_enumerable(const MuParams& params) {
  const auto size = enumeration_size(DistributionId::mu(), ScaledParams(1, params));
  return size && *size <= kEnumerationCap;
}

inline Rational enumerated_agreement(const PartialAssignment& alpha, const DistributionId& dist,
                                     const MuParams& params) {
  Rational total(0);
  for_each_in_distribution(dist, ScaledParams(1, params), [&](const LineFunction& f, const Rational& w) {
    if (agrees(f, alpha)) total += w;
  });
  return total;
}

}  // namespace detail

/// Pr_mu[f agrees with alpha] = Pr_{nu^j}[g agrees with alpha] for good alpha
/// not cutting j, checked analytically and, when feasible, by enumeration.
inline LemmaCheckResult check_goodalpha(const MuParams& params, const PartialAssignment& alpha, std::size_t j,
                                        bool enumerate = true) {
  LemmaCheckResult result;
  result.lemma = "goodalpha";
  result.parameters = {{"k", std::to_string(params.k)},
                       {"m", std::to_string(params.m)},
                       {"j", std::to_string(j)},
                       {"alpha", detail::describe(alpha)}};
  if (j >= params.k || !is_good_assignment(alpha, params.k, params.m)) {
    result.outcome = CheckOutcome::Skipped;
    result.detail = "assignment is not good or j is out of range";
    return result;
  }
  if (cut_indices(alpha, params.k).cuts(j)) {
    result.outcome = CheckOutcome::Skipped;
    result.detail = "assignment cuts j";
    return result;
  }
  result.cases = 1;
  const Rational mu = agreement_probability(alpha, DistributionId::mu(), params);
  const Rational nu = agreement_probability(alpha, DistributionId::nu_j(j), params);
  result.parameters["pr_mu"] = mu.str();
  result.parameters["pr_nu_j"] = nu.str();
  if (mu != nu) {
    result.fail("analytic probabilities differ: " + mu.str() + " vs " + nu.str());
    return result;
  }
  if (enumerate && detail::seeds_enumerable(params)) {
    const Rational mu_enum = detail::enumerated_agreement(alpha, DistributionId::mu(), params);
    const Rational nu_enum = detail::enumerated_agreement(alpha, DistributionId::nu_j(j), params);
    if (mu_enum != mu || nu_enum != nu) {
      result.fail("enumeration disagrees: mu " + mu_enum.str() + ", nu_j " + nu_enum.str() + ", analytic " + mu.str());
    }
    result.parameters["enumerated"] = "true";
  }
  return result;
}

/// Every good assignment on one point set, for one uncut level j: analytic
/// probabilities under mu and nu^j must coincide and match the empirical
/// restriction histogram of a full seed enumeration.
inline LemmaCheckResult check_goodalpha_on_points(const MuParams& params, const std::vector<Point>& points,
                                                  std::size_t j) {
  LemmaCheckResult result;
  result.lemma = "goodalpha";
  result.parameters = {{"k", std::to_string(params.k)},
                       {"m", std::to_string(params.m)},
                       {"j", std::to_string(j)},
                       {"points", detail::describe_points(points)}};
  if (j >= params.k || cut_indices(points, params.k).cuts(j)) {
    result.outcome = CheckOutcome::Skipped;
    result.detail = "points cut j";
    return result;
  }
  if (!detail::seeds_enumerable(params)) throw CapacityError("seed enumeration exceeds the cap");

  // Restriction histograms: encoded tuple of k-digit values -> number of seeds.
  const std::size_t flip = std::size_t{1} << (params.k - 1 - j);
  auto encode = [&](const std::vector<DigitString>& values) {
    std::string key;
    for (const auto& d : values) key.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(Digit));
    return key;
  };
  std::map<std::string, std::uint64_t> hist_mu, hist_nu;
  std::uint64_t seeds_total = 0;
  std::vector<Digit> odometer(params.prefix_count(), 0);
  while (true) {
    const DigitSeed seed(params, odometer);
    std::vector<DigitString> at_mu, at_nu;
    for (Point p : points) {
      at_mu.push_back(mu_digits(params, seed, p));
      at_nu.push_back(mu_digits(params, seed, p ^ flip));
    }
    ++hist_mu[encode(at_mu)];
    ++hist_nu[encode(at_nu)];
    ++seeds_total;
    std::size_t i = odometer.size();
    while (i > 0 && odometer[i - 1] == params.m - 2) odometer[--i] = 0;
    if (i == 0) break;
    ++odometer[i - 1];
  }

  // Every good value tuple: digits in [1, m-2] at each of k * |points| positions.
  const std::size_t positions = params.k * points.size();
  std::vector<Digit> tuple(positions, 1);
  const Digit top = params.m - 2;
  if (top < 1) return result;  // no good values exist
  while (true) {
    PartialAssignment alpha;
    std::vector<DigitString> values;
    for (std::size_t p = 0; p < points.size(); ++p) {
      DigitString d(tuple.begin() + static_cast<std::ptrdiff_t>(p * params.k),
                    tuple.begin() + static_cast<std::ptrdiff_t>((p + 1) * params.k));
      values.push_back(d);
      alpha.assign(points[p], RankValue::from_digits(params.m, d));
    }
    const Rational mu = agreement_probability(alpha, DistributionId::mu(), params);
    const Rational nu = agreement_probability(alpha, DistributionId::nu_j(j), params);
    const auto key = encode(values);
    auto count = [&](const std::map<std::string, std::uint64_t>& h) {
      auto it = h.find(key);
      return it == h.end() ? std::uint64_t{0} : it->second;
    };
    const Rational mu_enum(BigInt(count(hist_mu)), BigInt(seeds_total));
    const Rational nu_enum(BigInt(count(hist_nu)), BigInt(seeds_total));
    ++result.cases;
    if (mu != nu || mu != mu_enum || nu != nu_enum) {
      result.fail("alpha " + detail::describe(alpha) + ": mu " + mu.str() + " nu_j " + nu.str() + " enum mu " +
                  mu_enum.str() + " enum nu_j " + nu_enum.str());
      return result;
    }
    std::size_t i = positions;
    while (i > 0 && tuple[i - 1] == top) tuple[--i] = 1;
    if (i == 0) break;
    ++tuple[i - 1];
  }
  return result;
}

/// Pr_mu[f agrees with alpha] <= 2 Pr_nu[g agrees with alpha] for good alpha of
/// weight <= k/2, with Pr_nu the average of the k per-level probabilities.
/// Also checks the counting step: at least k/2 levels are uncut and each of
/// them contributes exactly Pr_mu.
inline LemmaCheckResult check_claim_good(const MuParams& params, const PartialAssignment& alpha) {
  LemmaCheckResult result;
  result.lemma = "claim-good";
  result.parameters = {{"k", std::to_string(params.k)},
                       {"m", std::to_string(params.m)},
                       {"alpha", detail::describe(alpha)}};
  if (!is_good_assignment(alpha, params.k, params.m) || 2 * alpha.weight() > params.k) {
    result.outcome = CheckOutcome::Skipped;
    result.detail = "assignment is not good or weighs more than k/2";
    return result;
  }
  result.cases = 1;
  const auto cuts = cut_indices(alpha, params.k);
  const Rational mu = agreement_probability(alpha, DistributionId::mu(), params);
  Rational nu_sum(0);
  std::size_t uncut = 0;
  for (std::size_t j = 0; j < params.k; ++j) {
    const Rational nu_j = agreement_probability(alpha, DistributionId::nu_j(j), params);
    nu_sum += nu_j;
    if (!cuts.cuts(j)) {
      ++uncut;
      if (nu_j != mu) result.fail("uncut level " + std::to_string(j) + " has Pr_nu_j " + nu_j.str() + " != " + mu.str());
    }
  }
  const Rational nu = nu_sum / Rational(static_cast<long long>(params.k));
  result.parameters["pr_mu"] = mu.str();
  result.parameters["pr_nu"] = nu.str();
  if (2 * uncut < params.k) result.fail("only " + std::to_string(uncut) + " uncut levels");
  if (mu > 2 * nu) result.fail("Pr_mu " + mu.str() + " > 2 Pr_nu " + (2 * nu).str());
  return result;
}

struct BadHitEstimate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double estimate = 0.0;
  double sigma = 0.0;
  double bound = 0.0;  // q * k * 2 / (m - 1)
  bool passed = true;
  bool informative = true;  // false when the bound is >= 1
};

/// Monte Carlo probability that q distinct uniformly random queries on f ~ mu
/// see a bad value. Random queries are a weaker searcher than the adaptive one
/// the bound is stated for, so this is a sanity check of the bound only.
inline BadHitEstimate estimate_bad_hit(const MuParams& params, std::size_t q, std::size_t trials, Rng& rng) {
  if (q > params.domain_size()) throw DomainError("q exceeds the domain size");
  if (trials == 0) throw DomainError("need at least one trial");
  BadHitEstimate out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto seed = DigitSeed::random(params, rng);
    const auto points = sample_distinct(rng, params.domain_size(), q);
    bool bad = false;
    for (auto x : points) {
      for (Digit d : mu_digits(params, seed, static_cast<std::size_t>(x))) {
        if (d == 0 || d == params.m - 1) bad = true;
      }
    }
    if (bad) ++out.hits;
  }
  const double p = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.estimate = p;
  out.sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  out.bound = static_cast<double>(q) * static_cast<double>(params.k) * 2.0 / static_cast<double>(params.m - 1);
  out.informative = out.bound < 1.0;
  out.passed = p <= out.bound + 3.0 * out.sigma;
  return out;
}

/// Every draw from nu^j (explicit seeds or random ones) must carry the 2^{k-1}
/// disjoint violating pairs {x, x | 2^{k-1-j}} and have line distance >= 2^{k-1}.
inline LemmaCheckResult check_far_from_monotone(const MuParams& params, std::size_t trials, Rng& rng,
                                                bool exhaustive = false) {
  LemmaCheckResult result;
  result.lemma = "nonmonotone";
  result.parameters = {{"k", std::to_string(params.k)}, {"m", std::to_string(params.m)}};
  const std::size_t half = params.domain_size() / 2;
  auto check = [&](const LineFunction& g, std::size_t j, const std::string& origin) {
    ++result.cases;
    const std::size_t bit = std::size_t{1} << (params.k - 1 - j);
    for (std::size_t x = 0; x < params.domain_size(); ++x) {
      if (!(x & bit) && !(g[x] > g[x | bit])) {
        result.fail(origin + ": pair (" + std::to_string(x) + "," + std::to_string(x | bit) + ") is not violating");
        return;
      }
    }
    const auto d = distance_to_monotone_line(g);
    if (d < half) result.fail(origin + ": distance " + std::to_string(d) + " < " + std::to_string(half));
  };
  if (exhaustive) {
    for (std::size_t j = 0; j < params.k; ++j) {
      for_each_in_distribution(DistributionId::nu_j(j), ScaledParams(1, params),
                               [&](const LineFunction& g, const Rational&) { check(g, j, "level " + std::to_string(j)); });
    }
  }
  for (std::size_t t = 0; t < trials; ++t) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, params.k));
    const auto seed = DigitSeed::random(params, rng);
    check(nu_j_from_seed(params, seed, j), j, "trial " + std::to_string(t));
  }
  result.parameters["exhaustive"] = exhaustive ? "true" : "false";
  return result;
}

using Tester = std::function<TesterReport(QueryOracle&, Rng&)>;

struct GapReport {
  std::size_t trials = 0;
  double accept_yes = 0.0;  // acceptance rate on the monotone distribution
  double accept_no = 0.0;
  double gap = 0.0;
  double mean_queries_yes = 0.0;
  double mean_queries_no = 0.0;
  std::size_t max_queries = 0;
};

/// Runs `tester` on `trials` draws from each side. Trial i of side s uses the
/// stream derive_stream(base_seed, 2 i + s) for both the draw and the tester.
/// With a budget, a run that exhausts it accepts (a budget-capped tester).
inline GapReport distinguishing_experiment(const Tester& tester, const DistributionId& yes, const DistributionId& no,
                                           const ScaledParams& params, std::size_t trials, std::uint64_t base_seed,
                                           std::optional<std::size_t> budget = std::nullopt) {
  if (trials == 0) throw DomainError("need at least one trial");
  GapReport out;
  out.trials = trials;
  for (int side = 0; side < 2; ++side) {
    std::size_t accepted = 0;
    std::size_t queries = 0;
    for (std::size_t i = 0; i < trials; ++i) {
      Rng rng = derive_stream(base_seed, 2 * i + static_cast<std::uint64_t>(side));
      const auto f = sample(side == 0 ? yes : no, params, rng);
      QueryOracle oracle(f, true, budget);
      Verdict v = Verdict::Accept;
      try {
        v = tester(oracle, rng).verdict;
      } catch (const BudgetExhausted&) {
        v = Verdict::Accept;
      }
      if (v == Verdict::Accept) ++accepted;
      queries += oracle.queries();
      out.max_queries = std::max(out.max_queries, oracle.queries());
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(trials);
    const double mean = static_cast<double>(queries) / static_cast<double>(trials);
    if (side == 0) {
      out.accept_yes = rate;
      out.mean_queries_yes = mean;
    } else {
      out.accept_no = rate;
      out.mean_queries_no = mean;
    }
  }
  out.gap = out.accept_yes - out.accept_no;
  return out;
}

}  // namespace monotest
