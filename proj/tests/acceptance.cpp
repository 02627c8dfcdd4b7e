// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "monotest/monotest.hpp"
#include "oracles.hpp"

using namespace monotest;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

// Time limits pinned per criterion; 0 means unbounded.
struct Criterion {
  int id;
  const char* title;
  double seconds_limit;
  std::function<Outcome()> body;
};

Outcome failed(std::string why) { return {false, std::move(why)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LineFunction random_sorted(Rng& rng, std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = uniform_below(rng, 1u << 20);
  std::sort(v.begin(), v.end());
  return LineFunction::from_integers(v);
}

LineFunction random_array(Rng& rng, std::size_t n, std::uint64_t range) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = uniform_below(rng, range);
  return LineFunction::from_integers(v);
}

// Lower end of the Wilson score interval.
double wilson_lower(std::size_t hits, std::size_t trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1 + z * z / n;
  const double centre = p + z * z / (2 * n);
  const double spread = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return (centre - spread) / denom;
}

Outcome monotone_soundness() {
  Rng rng(1001);
  std::size_t rejections = 0, runs = 0;
  const Rational eps_choices[] = {Rational(1, 2), Rational(1, 8)};
  for (std::size_t i = 0; i < 5000; ++i) {
    const MuParams p(10, static_cast<std::uint32_t>(5 + uniform_below(rng, 996)));
    const auto f = mu_from_seed(p, DigitSeed::random(p, rng));
    TesterConfig c;
    c.epsilon = eps_choices[i % 2];
    QueryOracle o(f);
    rejections += test_improved(o, c, rng).verdict == Verdict::Reject;
    ++runs;
  }
  for (std::size_t i = 0; i < 5000; ++i) {
    TesterConfig c;
    c.epsilon = eps_choices[i % 2];
    const std::size_t n = 16 + uniform_below(rng, 4081);
    const auto f = random_sorted(rng, n);
    QueryOracle o(f);
    rejections += test_improved(o, c, rng).verdict == Verdict::Reject;
    ++runs;
  }
  if (rejections) return failed(fmt("%zu rejections in %zu runs", rejections, runs));
  return {true, fmt("%zu runs, 0 rejections", runs)};
}

Outcome nu_farness() {
  Rng rng(1002);
  std::size_t cross_checked = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const std::size_t k = 4 + uniform_below(rng, 9);
    const MuParams p(k, static_cast<std::uint32_t>(5 + uniform_below(rng, 60)));
    const auto g = sample(DistributionId::nu(), p, rng);
    const std::size_t d = distance_to_monotone_line(g);
    if (d < p.domain_size() / 2) return failed(fmt("k=%zu draw %zu has distance %zu", k, i, d));
    if (k <= 8) {
      if (oracle::line_distance_quadratic(g) != d) return failed(fmt("oracle disagrees on draw %zu", i));
      ++cross_checked;
    }
  }
  return {true, fmt("1000 draws, %zu cross-checked by the quadratic oracle", cross_checked)};
}

Outcome tester_completeness() {
  TesterConfig c;
  c.epsilon = Rational(1, 2);
  c.c = 6;
  std::size_t rejects = 0;
  const std::size_t trials = 1000;
  const MuParams p(10, 5);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = derive_stream(1003, t);
    const auto g = sample(DistributionId::nu(), p, rng);
    QueryOracle o(g);
    rejects += test_improved(o, c, rng).verdict == Verdict::Reject;
  }
  const double lower = wilson_lower(rejects, trials, 2.5758);
  const auto note = fmt("rejection rate %.3f, 99%% lower bound %.3f", static_cast<double>(rejects) / trials, lower);
  return {lower >= 0.66, note};
}

Outcome query_budget() {
  Rng rng(1004);
  std::size_t runs = 0, worst_slack = static_cast<std::size_t>(-1);
  for (const Rational& eps : {Rational(1, 2), Rational(1, 8), Rational(1, 64)}) {
    TesterConfig c;
    c.epsilon = eps;
    for (std::size_t n : {std::size_t{128}, std::size_t{1000}, std::size_t{1} << 10, std::size_t{12345},
                          std::size_t{1} << 16, std::size_t{1} << 20}) {
      const std::size_t bound = improved_query_budget(c, n);
      const std::size_t trials = n >= (std::size_t{1} << 20) ? 3 : 10;
      const auto sorted = random_sorted(rng, n);
      const auto noisy = random_array(rng, n, 1000);
      for (std::size_t t = 0; t < trials; ++t) {
        for (const LineFunction* f : {&sorted, &noisy}) {
          for (bool memoize : {true, false}) {
            QueryOracle o(*f, memoize);
            const auto r = test_improved(o, c, rng);
            if (r.queries > bound) {
              return failed(fmt("eps=%s n=%zu: %zu queries > bound %zu", eps.str().c_str(), n, r.queries, bound));
            }
            worst_slack = std::min(worst_slack, bound - r.queries);
            ++runs;
          }
        }
      }
    }
  }
  return {true, fmt("%zu runs within the bound (min slack %zu)", runs, worst_slack)};
}

Outcome definition_equivalence() {
  std::size_t compared = 0;
  for (std::size_t k = 1; k <= 3; ++k) {
    const MuParams p(k, 5);
    std::vector<Digit> digits(p.prefix_count(), 0);
    do {
      const DigitSeed seed(p, digits);
      if (!(mu_from_seed(p, seed) == mu_from_seed_recursive(p, seed))) return failed(fmt("k=%zu seed differs", k));
      ++compared;
    } while (oracle::next_seed(digits, p.m));
  }
  Rng rng(1005);
  for (std::size_t i = 0; i < 10000; ++i) {
    const std::size_t k = 1 + uniform_below(rng, 10);
    const MuParams p(k, static_cast<std::uint32_t>(3 + uniform_below(rng, 998)));
    const auto seed = DigitSeed::random(p, rng);
    if (!(mu_from_seed(p, seed) == mu_from_seed_recursive(p, seed))) return failed(fmt("random seed %zu differs", i));
    ++compared;
  }
  return {true, fmt("%zu seeds identical", compared)};
}

Outcome lemma_goodalpha() {
  Rng rng(1006);
  std::size_t sets = 0, cases = 0;
  for (std::size_t k : {2, 3}) {
    const MuParams p(k, 5);
    std::size_t drawn = 0;
    while (drawn < 100) {
      const std::size_t w = 1 + uniform_below(rng, 3);
      const auto s = sample_distinct(rng, p.domain_size(), w);
      const std::vector<Point> points(s.begin(), s.end());
      const auto cuts = cut_indices(points, k);
      if (cuts.cut.size() == k) continue;  // no uncut index
      ++drawn;
      for (std::size_t j = 0; j < k; ++j) {
        if (cuts.cuts(j)) continue;
        const auto r = check_goodalpha_on_points(p, points, j);
        if (r.outcome != CheckOutcome::Verified) return failed(r.detail);
        cases += r.cases;
      }
    }
    sets += drawn;
  }
  return {true, fmt("%zu point sets, %zu good assignments exactly equal", sets, cases)};
}

Outcome claim_good() {
  std::size_t cases = 0;
  // Every good assignment of weight <= floor(k/2) for k in {2, 3}.
  for (std::size_t k : {2, 3}) {
    const MuParams p(k, 5);
    const auto r0 = check_claim_good(p, PartialAssignment{});
    if (r0.outcome != CheckOutcome::Verified) return failed(r0.detail);
    const auto total = big_pow(5, k).convert_to<std::uint64_t>();
    for (Point x = 0; x < p.domain_size(); ++x) {
      for (std::uint64_t v = 0; v < total; ++v) {
        if (classify_value(v, k, 5) != ValueClass::Good) continue;
        const auto r = check_claim_good(p, PartialAssignment{{x, RankValue(v)}});
        if (r.outcome != CheckOutcome::Verified) return failed(r.detail);
        ++cases;
      }
    }
  }
  // Larger k, random good assignments that the distributions can actually produce.
  Rng rng(1007);
  for (std::size_t k : {4, 6, 8}) {
    const MuParams p(k, 5);
    std::size_t done = 0;
    while (done < 500) {
      const auto alpha = random_good_assignment(p, 1 + uniform_below(rng, k / 2), rng);
      if (!alpha) continue;
      const auto r = check_claim_good(p, *alpha);
      if (r.outcome != CheckOutcome::Verified) return failed(r.detail);
      ++done;
    }
    cases += done;
  }
  return {true, fmt("%zu assignments satisfy Pr_mu <= 2 Pr_nu", cases)};
}

Outcome cut_lemma() {
  Rng rng(1008);
  std::size_t cases = 0;
  for (std::size_t w = 1; w <= 5; ++w) {
    const auto r = check_cut_lemma(4, w, 0, rng);
    if (r.outcome != CheckOutcome::Verified) return failed(r.detail);
    if (r.cases != detail::binomial(16, w)) return failed("exhaustive enumeration is incomplete");
    cases += r.cases;
  }
  const auto random = check_cut_lemma(16, 8, 10000, rng);
  if (random.outcome != CheckOutcome::Verified) return failed(random.detail);
  cases += random.cases;
  for (std::size_t k = 1; k <= 16; ++k) {
    const auto tight = check_cut_tightness(k);
    if (tight.outcome != CheckOutcome::Verified) return failed(tight.detail);
    cases += tight.cases;
  }
  return {true, fmt("%zu point sets, tight witnesses for k <= 16", cases)};
}

Outcome claim_bad() {
  Rng rng(1009);
  std::string note;
  bool pass = true;
  for (const auto& [k, m] : std::vector<std::pair<std::size_t, std::uint32_t>>{{6, 64}, {8, 512}}) {
    const auto e = estimate_bad_hit(MuParams(k, m), k / 2, 100000, rng);
    pass = pass && e.passed && e.informative;
    if (!note.empty()) note += ", ";
    note += fmt("(k=%zu,m=%u) est %.4f <= %.4f + 3*%.4f", k, m, e.estimate, e.bound, e.sigma);
  }
  return {pass, note};
}

Outcome scaled_farness() {
  Rng rng(1010);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    const ScaledParams p(1 + uniform_below(rng, 8), MuParams(1 + uniform_below(rng, 8), 5));
    const auto g = sample(DistributionId::nu_tilde(), p, rng);
    const std::size_t d = distance_to_monotone_line(g);
    const Rational eps_n = p.epsilon() * Rational(BigInt(p.domain_size()));
    if (Rational(BigInt(d)) < eps_n) return failed(fmt("nu-tilde draw %zu: distance %zu < eps n", i, d));
    if (p.domain_size() <= 512 && oracle::line_distance_quadratic(g) != d) return failed("oracle disagrees");
    const auto f = sample(DistributionId::mu_tilde(), p, rng);
    if (distance_to_monotone_line(f) != 0) return failed(fmt("mu-tilde draw %zu is not monotone", i));
    checked += 2;
  }
  return {true, fmt("%zu draws", checked)};
}

Outcome greedy_certificate() {
  Rng rng(1011);
  std::size_t functions = 0, pairs_total = 0;
  while (functions < 500) {
    LineFunction f = LineFunction::from_integers({0});
    switch (functions % 4) {
      case 0: f = random_array(rng, 8 + uniform_below(rng, 505), 1 + uniform_below(rng, 50)); break;
      case 1: f = sample(DistributionId::nu(), MuParams(2 + uniform_below(rng, 7), 5), rng); break;
      case 2: {
        const ScaledParams p(1 + uniform_below(rng, 6), MuParams(1 + uniform_below(rng, 6), 5));
        f = sample(DistributionId::nu_tilde(), p, rng);
        break;
      }
      default: {
        auto base = random_sorted(rng, 8 + uniform_below(rng, 400));
        std::vector<RankValue> v(base.values().begin(), base.values().end());
        for (std::size_t s = 0, swaps = 1 + uniform_below(rng, v.size() / 4); s < swaps; ++s) {
          std::swap(v[uniform_below(rng, v.size())], v[uniform_below(rng, v.size())]);
        }
        f = LineFunction(std::move(v), base.range_bound());
      }
    }
    const std::size_t d = oracle::line_distance_quadratic(f);
    if (d < 2) continue;
    ++functions;
    const Rational eps(BigInt(d), BigInt(f.size()));
    std::vector<ViolationPair> pairs;
    try {
      pairs = find_disjoint_violating_pairs(f, eps);
    } catch (const CertificateError& e) {
      return failed(e.what());
    }
    if (pairs.size() != d / 2) return failed(fmt("%zu pairs, expected %zu", pairs.size(), d / 2));
    std::set<Point> used;
    const std::size_t levels = improved_levels(eps, f.size());
    for (const auto& [x, y] : pairs) {
      if (!(x < y) || !(f[x] > f[y]) || y - x > d) return failed("pair is not a short violation");
      if (!used.insert(x).second || !used.insert(y).second) return failed("pairs overlap");
      QueryOracle ox(f), oy(f);
      if (!probe_point(ox, x, levels) && !probe_point(oy, y, levels)) {
        return failed(fmt("neither endpoint of (%zu,%zu) is detected", x, y));
      }
    }
    pairs_total += pairs.size();
  }
  return {true, fmt("%zu functions, %zu pairs certified and detected", functions, pairs_total)};
}

Outcome hypergrid() {
  Rng rng(1012);
  std::size_t configs = 0, exact = 0;
  for (std::size_t total = 2; total <= 12; ++total) {
    for (std::size_t d = 1; d <= total; ++d) {
      if (total % d) continue;
      const std::size_t b = total / d;
      const auto order = regrouped_order(d, b);
      for (std::size_t a = 0; a < total; ++a) {
        const ScaledParams p(std::size_t{1} << a, MuParams(total - a, 5));
        const auto f = sample(DistributionId::mu_tilde(), p, rng);
        if (!violating_pairs(f, order).empty()) return failed(fmt("mu-tilde violates on d=%zu b=%zu", d, b));
        const auto g = sample(DistributionId::nu_tilde(), p, rng);
        const std::size_t eps_n = p.domain_size() / (2 * p.ell);  // exact: 2^(k-1)
        const std::size_t disjoint = maximal_disjoint_violations(g, order).size();
        if (2 * disjoint < eps_n) return failed(fmt("d=%zu b=%zu a=%zu: %zu disjoint pairs", d, b, a, disjoint));
        const std::size_t dist = distance_to_monotone_poset_by_matching(g, order);
        if (dist < eps_n) return failed(fmt("d=%zu b=%zu a=%zu: distance %zu < %zu", d, b, a, dist, eps_n));
        if (p.domain_size() <= 16 && distance_to_monotone_poset(g, order) != dist) {
          return failed("vertex-cover oracle disagrees with matching");
        }
        ++configs;
        ++exact;
      }
    }
  }
  return {true, fmt("%zu (d, b, ell) configurations, %zu exact distances", configs, exact)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "monotone soundness", 10.0, monotone_soundness},
      {2, "farness of nu", 5.0, nu_farness},
      {3, "tester completeness", 10.0, tester_completeness},
      {4, "query budget", 0, query_budget},
      {5, "definition equivalence", 0, definition_equivalence},
      {6, "good assignments agree exactly", 0, lemma_goodalpha},
      {7, "good-assignment inequality", 0, claim_good},
      {8, "cut lemma", 0, cut_lemma},
      {9, "bad-hit probability", 0, claim_bad},
      {10, "scaled construction", 0, scaled_farness},
      {11, "greedy certificate", 0, greedy_certificate},
      {12, "hypergrid embedding", 0, hypergrid},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = failed(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.seconds_limit > 0 && secs > c.seconds_limit) {
      o.pass = false;
      o.note += fmt(" [over the %.0f s limit]", c.seconds_limit);
    }
    std::printf("%s  %2d  %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.note.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
