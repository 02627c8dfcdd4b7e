#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "monotest/monotest.hpp"

namespace monotest::cli {

using Json = nlohmann::ordered_json;

// Bad flags or flag combinations; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kRejected = 1, kUsage = 2 };

// "p/q" or "p"; decimals are refused so that eps * n stays exact.
inline Rational parse_rational(const std::string& text) {
  static const std::regex form(R"(^\s*(\d+)(?:\s*/\s*(\d+))?\s*$)");
  std::smatch match;
  if (!std::regex_match(text, match, form)) {
    throw UsageError("epsilon must be a rational 'p/q' (got '" + text + "'); floats are not accepted");
  }
  const BigInt p(match[1].str());
  const BigInt q(match[2].matched ? BigInt(match[2].str()) : BigInt(1));
  if (q == 0) throw UsageError("epsilon has a zero denominator");
  return Rational(p, q);
}

inline std::string rational_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Json pair_json(const ViolationPair& p) { return Json::array({p.x, p.y}); }

inline Json tool_json() { return Json{{"name", "monotest"}, {"version", kVersion}}; }

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  bool json = false;
};

struct DistOptions {
  std::string dist;
  std::size_t k = 3;
  std::uint32_t m = 5;
  std::size_t ell = 1;
};

inline void add_dist_options(CLI::App* cmd, DistOptions& o, bool required) {
  auto* opt = cmd->add_option("--dist", o.dist, "mu, nu, nu-j:<j>, mu-tilde, nu-tilde, nu-tilde:<t>:<j>");
  if (required) opt->required();
  cmd->add_option("--k", o.k, "levels (block domain is 2^k)")->capture_default_str();
  cmd->add_option("--m", o.m, "digit base")->capture_default_str();
  cmd->add_option("--ell", o.ell, "number of blocks for the scaled distributions")->capture_default_str();
}

inline ScaledParams scaled_params(const DistOptions& o) {
  return ScaledParams(o.ell, MuParams(o.k, o.m));
}

inline DistributionId checked_dist(const DistOptions& o) {
  const auto id = DistributionId::parse(o.dist);
  id.validate(scaled_params(o));
  return id;
}

inline Json dist_json(const DistOptions& o) {
  return Json{{"dist", o.dist}, {"k", o.k}, {"m", o.m}, {"ell", o.ell}};
}

// Writes to --out when given, otherwise to the primary stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

inline void emit_json(const Json& doc, const GlobalOptions& g, std::ostream& out) {
  Sink sink(g.out, out);
  sink.stream() << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  DistOptions dist;
  bool with_distance = false;
};

inline int cmd_gen(const GenOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto id = checked_dist(o.dist);
  Rng rng = derive_stream(g.seed, 0);
  const auto f = sample(id, scaled_params(o.dist), rng);

  // The function file goes to --out or stdout; the summary goes wherever the file does not.
  std::ostream& summary = g.out.empty() ? err : out;
  {
    Sink sink(g.out, out);
    write_function(sink.stream(), f);
  }
  Json doc{{"n", f.size()}, {"r", f.range_bound().to_string()}};
  if (o.with_distance) doc["distance"] = distance_to_monotone_line(f);
  if (g.json) {
    summary << doc.dump() << '\n';
  } else {
    summary << "n " << f.size() << "\nr " << f.range_bound().to_string() << '\n';
    if (o.with_distance) summary << "distance " << doc["distance"].get<std::size_t>() << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- dist

inline int cmd_dist(const std::string& input, const GlobalOptions& g, std::ostream& out) {
  const auto f = load_function(input);
  const std::size_t d = distance_to_monotone_line(f);
  const Rational ratio(BigInt(d), BigInt(f.size()));
  const auto certificate = d > 0 ? greedy_neighbor_pairs(f) : std::vector<ViolationPair>{};
  Sink sink(g.out, out);
  if (g.json) {
    Json pairs = Json::array();
    for (const auto& p : certificate) pairs.push_back(pair_json(p));
    Json doc{{"n", f.size()}, {"distance", d}, {"ratio", rational_string(ratio)},
             {"ratio_decimal", to_double(ratio)}, {"certificate", pairs}};
    sink.stream() << doc.dump(2) << '\n';
  } else {
    auto& os = sink.stream();
    os << "n " << f.size() << "\ndistance " << d << "\nratio " << rational_string(ratio) << " ("
       << to_double(ratio) << ")\n";
    if (d > 0) {
      os << "certificate " << certificate.size() << " disjoint violating pairs:";
      for (const auto& p : certificate) os << " (" << p.x << "," << p.y << ")";
      os << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- test

struct TestOptions {
  std::string algo = "improved";
  std::string eps = "1/2";
  std::uint32_t c = 6;
  std::size_t trials = 1;
  std::size_t threads = 1;
  std::string input;
  DistOptions dist;
};

struct TrialRecord {
  Verdict verdict = Verdict::Accept;
  std::size_t queries = 0;
  std::optional<ViolationPair> witness;
};

inline TesterReport run_tester(const std::string& algo, QueryOracle& oracle, const TesterConfig& config, Rng& rng) {
  if (algo == "improved") return test_improved(oracle, config, rng);
  if (algo == "ergun") return test_ergun(oracle, config, rng);
  return test_exhaustive(oracle);
}

inline std::size_t per_run_budget(const std::string& algo, const TesterConfig& config, std::size_t n) {
  if (algo == "improved") return improved_query_budget(config, n);
  if (algo == "ergun") return ergun_query_budget(config, n);
  return n;
}

// Runs body(i) for i in [0, count) on `threads` workers; results are stored
// by index so the order of completion does not matter.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline int cmd_test(const TestOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.input.empty() == o.dist.dist.empty()) throw UsageError("test needs exactly one of --input or --dist");
  if (o.trials == 0) throw UsageError("--trials must be positive");
  TesterConfig config;
  config.epsilon = parse_rational(o.eps);
  config.c = o.c;
  config.seed = g.seed;
  if (config.epsilon <= 0 || config.epsilon > 1) throw UsageError("epsilon must lie in (0, 1]");

  std::optional<LineFunction> fixed;
  std::optional<DistributionId> id;
  std::size_t n = 0;
  if (!o.input.empty()) {
    fixed = load_function(o.input);
    n = fixed->size();
  } else {
    id = checked_dist(o.dist);
    n = scaled_params(o.dist).domain_size();
  }
  // Raises ConfigError up front when eps * n < 2 for the improved tester.
  const std::size_t budget = per_run_budget(o.algo, config, n);

  std::vector<TrialRecord> records(o.trials);
  parallel_for(o.trials, o.threads, [&](std::size_t i) {
    Rng rng = derive_stream(g.seed, i);
    std::optional<LineFunction> drawn;
    if (id) drawn = sample(*id, scaled_params(o.dist), rng);
    const LineFunction& f = fixed ? *fixed : *drawn;
    QueryOracle oracle(f);
    const auto report = run_tester(o.algo, oracle, config, rng);
    records[i] = {report.verdict, report.queries, report.witness};
  });

  Json spec{{"command", "test"}, {"algo", o.algo}, {"eps", rational_string(config.epsilon)}, {"c", o.c},
            {"trials", o.trials}, {"seed", g.seed}};
  if (fixed) {
    spec["input"] = o.input;
  } else {
    spec.update(dist_json(o.dist));
  }
  Json trials = Json::array();
  Json witnesses = Json::array();
  std::size_t accepts = 0, total_queries = 0, max_queries = 0;
  bool within_budget = true;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    trials.push_back({{"trial", i},
                      {"verdict", to_string(r.verdict)},
                      {"queries", r.queries},
                      {"witness", r.witness ? pair_json(*r.witness) : Json(nullptr)}});
    if (r.witness) witnesses.push_back({{"trial", i}, {"pair", pair_json(*r.witness)}});
    accepts += r.verdict == Verdict::Accept;
    total_queries += r.queries;
    max_queries = std::max(max_queries, r.queries);
    within_budget = within_budget && r.queries <= budget;
  }
  const std::size_t rejects = records.size() - accepts;
  const bool accept_majority = accepts >= rejects;
  Json doc{{"schema", 1},
           {"spec", spec},
           {"n", n},
           {"trials", trials},
           {"verdict_counts", {{"accept", accepts}, {"reject", rejects}}},
           {"accept_rate", static_cast<double>(accepts) / static_cast<double>(records.size())},
           {"mean_queries", static_cast<double>(total_queries) / static_cast<double>(records.size())},
           {"max_queries", max_queries},
           {"budget", budget},
           {"within_budget", within_budget},
           {"witnesses", witnesses},
           {"verdict", accept_majority ? "accept" : "reject"},
           {"tool", tool_json()}};
  emit_json(doc, g, out);
  return accept_majority ? kOk : kRejected;
}

// ---------------------------------------------------------------- pairs

inline int cmd_pairs(const std::string& input, const std::string& eps_text, const GlobalOptions& g,
                     std::ostream& out, std::ostream& err) {
  const auto f = load_function(input);
  const Rational eps = parse_rational(eps_text);
  if (eps <= 0 || eps > 1) throw UsageError("epsilon must lie in (0, 1]");
  std::vector<ViolationPair> pairs;
  try {
    pairs = find_disjoint_violating_pairs(f, eps);
  } catch (const CertificateError& e) {
    err << "monotest: " << e.what() << '\n';
    return kRejected;
  }
  const Rational gap_bound = eps * Rational(BigInt(f.size()));
  Json list = Json::array();
  for (const auto& p : pairs) {
    const bool short_gap = Rational(BigInt(p.y - p.x)) <= gap_bound;
    Json entry{{"pair", pair_json(p)}, {"gap", p.y - p.x}, {"gap_within_eps_n", short_gap}};
    if (p.y >= p.x + 2) entry["split_level"] = split_level(p.x, p.y);
    list.push_back(entry);
  }
  Sink sink(g.out, out);
  if (g.json) {
    sink.stream() << Json{{"n", f.size()}, {"eps", rational_string(eps)}, {"pairs", list}}.dump(2) << '\n';
  } else {
    sink.stream() << pairs.size() << " disjoint violating pairs\n";
    for (const auto& p : pairs) sink.stream() << p.x << ' ' << p.y << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string lemma;
  std::size_t k = 4;
  std::uint32_t m = 5;
  bool exhaustive = false;
  std::size_t trials = 100;
  std::optional<std::size_t> weight;
  std::optional<std::size_t> q;
};

inline Json result_json(const LemmaCheckResult& r) {
  Json params = Json::object();
  for (const auto& [key, value] : r.parameters) params[key] = value;
  return Json{{"lemma", r.lemma},
              {"parameters", params},
              {"outcome", to_string(r.outcome)},
              {"cases", r.cases},
              {"informative", r.informative},
              {"detail", r.detail}};
}

// Folds many single-case checks into one summary row; skipped cases are counted.
struct Tally {
  LemmaCheckResult summary;
  std::size_t skipped = 0;

  void add(const LemmaCheckResult& r) {
    if (r.outcome == CheckOutcome::Skipped) {
      ++skipped;
      return;
    }
    summary.cases += r.cases;
    if (r.outcome == CheckOutcome::Counterexample) summary.fail(r.detail);
  }

  Json json() const {
    auto j = result_json(summary);
    j["skipped"] = skipped;
    return j;
  }
};

inline std::vector<Json> verify_cut(const VerifyOptions& o, Rng& rng) {
  std::vector<Json> rows;
  const std::size_t domain = std::size_t{1} << std::min<std::size_t>(o.k, 62);
  const std::size_t top = o.weight ? *o.weight : std::min(domain, o.k + 1);
  const std::size_t first = o.weight ? *o.weight : 1;
  // Exhaustive runs skip the extra random sets.
  const bool exhaustive = o.exhaustive || domain <= 16;
  const std::size_t trials = exhaustive ? 0 : o.trials;
  for (std::size_t w = first; w <= top; ++w) rows.push_back(result_json(check_cut_lemma(o.k, w, trials, rng, exhaustive)));
  rows.push_back(result_json(check_cut_tightness(o.k)));
  return rows;
}

inline std::vector<Json> verify_goodalpha(const VerifyOptions& o, Rng& rng) {
  const MuParams params(o.k, o.m);
  const std::size_t top = o.weight ? *o.weight : std::min<std::size_t>(3, params.domain_size());
  std::vector<Json> rows;
  if (!detail::seeds_enumerable(params)) {
    if (o.exhaustive) throw CapacityError("seed enumeration exceeds the cap; drop --exhaustive");
    Tally tally;
    tally.summary.lemma = "goodalpha";
    tally.summary.parameters = {{"k", std::to_string(o.k)}, {"m", std::to_string(o.m)}, {"mode", "analytic"}};
    for (std::size_t t = 0; t < o.trials; ++t) {
      const auto alpha = random_good_assignment(params, 1 + uniform_below(rng, top), rng);
      if (!alpha) {
        ++tally.skipped;
        continue;
      }
      const auto j = static_cast<std::size_t>(uniform_below(rng, params.k));
      tally.add(check_goodalpha(params, *alpha, j, false));
    }
    rows.push_back(tally.json());
    return rows;
  }
  for (std::size_t w = 1; w <= top; ++w) {
    Tally tally;
    tally.summary.lemma = "goodalpha";
    tally.summary.parameters = {{"k", std::to_string(o.k)}, {"m", std::to_string(o.m)}, {"weight", std::to_string(w)},
                                {"exhaustive", o.exhaustive ? "true" : "false"}};
    auto run_set = [&](const std::vector<Point>& points) {
      for (std::size_t j = 0; j < params.k; ++j) tally.add(check_goodalpha_on_points(params, points, j));
    };
    if (o.exhaustive) {
      detail::for_each_subset(params.domain_size(), w, run_set);
    } else {
      for (std::size_t t = 0; t < o.trials; ++t) {
        const auto drawn = sample_distinct(rng, params.domain_size(), w);
        run_set(std::vector<Point>(drawn.begin(), drawn.end()));
      }
    }
    rows.push_back(tally.json());
  }
  return rows;
}

inline constexpr std::uint64_t kClaimGoodCaseCap = 2'000'000;

inline std::vector<Json> verify_claim_good(const VerifyOptions& o, Rng& rng) {
  const MuParams params(o.k, o.m);
  const std::size_t top = o.weight ? *o.weight : params.k / 2;
  if (2 * top > params.k) throw UsageError("claim-good needs weight <= k/2");
  std::vector<Json> rows;
  for (std::size_t w = 0; w <= top; ++w) {
    Tally tally;
    tally.summary.lemma = "claim-good";
    tally.summary.parameters = {{"k", std::to_string(o.k)}, {"m", std::to_string(o.m)}, {"weight", std::to_string(w)},
                                {"exhaustive", o.exhaustive ? "true" : "false"}};
    if (w == 0) {
      tally.add(check_claim_good(params, PartialAssignment{}));
    } else if (o.exhaustive) {
      if (params.m < 3) throw UsageError("no good values exist for m < 3");
      const BigInt per_set = big_pow(params.m - 2, params.k * w);
      const BigInt total = per_set * BigInt(detail::binomial(params.domain_size(), w));
      if (total > kClaimGoodCaseCap) throw CapacityError("exhaustive claim-good would check " + total.str() + " assignments");
      detail::for_each_subset(params.domain_size(), w, [&](const std::vector<Point>& points) {
        std::vector<Digit> tuple(params.k * w, 1);
        while (true) {
          PartialAssignment alpha;
          for (std::size_t p = 0; p < w; ++p) {
            DigitString d(tuple.begin() + static_cast<std::ptrdiff_t>(p * params.k),
                          tuple.begin() + static_cast<std::ptrdiff_t>((p + 1) * params.k));
            alpha.assign(points[p], RankValue::from_digits(params.m, d));
          }
          tally.add(check_claim_good(params, alpha));
          std::size_t i = tuple.size();
          while (i > 0 && tuple[i - 1] == params.m - 2) tuple[--i] = 1;
          if (i == 0) break;
          ++tuple[i - 1];
        }
      });
    } else {
      for (std::size_t t = 0; t < o.trials; ++t) {
        const auto alpha = random_good_assignment(params, w, rng);
        if (alpha) {
          tally.add(check_claim_good(params, *alpha));
        } else {
          ++tally.skipped;
        }
      }
    }
    rows.push_back(tally.json());
  }
  return rows;
}

inline std::vector<Json> verify_claim_bad(const VerifyOptions& o, Rng& rng) {
  const MuParams params(o.k, o.m);
  const std::size_t q = o.q ? *o.q : std::max<std::size_t>(1, params.k / 2);
  if (o.trials == 0) throw UsageError("--trials must be positive");
  const auto e = estimate_bad_hit(params, q, o.trials, rng);
  LemmaCheckResult r;
  r.lemma = "claim-bad";
  r.parameters = {{"k", std::to_string(o.k)}, {"m", std::to_string(o.m)}, {"q", std::to_string(q)}};
  r.cases = e.trials;
  r.informative = e.informative;
  if (!e.passed) r.fail("estimate exceeds bound + 3 sigma");
  auto row = result_json(r);
  row["hits"] = e.hits;
  row["estimate"] = e.estimate;
  row["sigma"] = e.sigma;
  row["bound"] = e.bound;
  return {row};
}

inline int cmd_verify(const VerifyOptions& o, const GlobalOptions& g, std::ostream& out) {
  Rng rng = derive_stream(g.seed, 0);
  std::vector<Json> rows;
  if (o.lemma == "cut") {
    if (o.k < 1 || o.k > 62) throw UsageError("--k must be in [1, 62] for the cut lemma");
    rows = verify_cut(o, rng);
  } else if (o.lemma == "goodalpha") {
    rows = verify_goodalpha(o, rng);
  } else if (o.lemma == "claim-good") {
    rows = verify_claim_good(o, rng);
  } else if (o.lemma == "claim-bad") {
    rows = verify_claim_bad(o, rng);
  } else {
    rows.push_back(result_json(check_far_from_monotone(MuParams(o.k, o.m), o.trials, rng, o.exhaustive)));
  }
  std::size_t counterexamples = 0, cases = 0;
  for (const auto& r : rows) {
    counterexamples += r["outcome"] == "counterexample";
    cases += r["cases"].get<std::size_t>();
  }
  Json spec{{"command", "verify"}, {"lemma", o.lemma}, {"k", o.k}, {"m", o.m}, {"exhaustive", o.exhaustive},
            {"trials", o.trials}, {"seed", g.seed}};
  if (o.weight) spec["weight"] = *o.weight;
  if (o.q) spec["q"] = *o.q;
  Json doc{{"schema", 1},
           {"spec", spec},
           {"results", rows},
           {"cases", cases},
           {"counterexamples", counterexamples},
           {"verdict", counterexamples ? "counterexample" : "verified"},
           {"tool", tool_json()}};
  emit_json(doc, g, out);
  return counterexamples ? kRejected : kOk;
}

// ---------------------------------------------------------------- grid

struct GridOptions {
  std::size_t d = 2;
  std::size_t b = 4;
  std::string input;
  DistOptions dist;
};

// Disjoint violating pairs found along one axis: the axis lines are disjoint
// chains, so greedy pairs inside them never share a point. Best axis wins.
inline std::size_t axis_chain_pairs(const LineFunction& f, std::size_t d, std::size_t b) {
  const std::size_t side = std::size_t{1} << b;
  std::size_t best = 0;
  for (std::size_t axis = 0; axis < d; ++axis) {
    const std::size_t stride = std::size_t{1} << (b * (d - 1 - axis));
    std::size_t found = 0;
    std::vector<RankValue> chain;
    for (std::size_t start = 0; start < f.size(); ++start) {
      if ((start / stride) % side != 0) continue;
      chain.clear();
      for (std::size_t i = 0; i < side; ++i) chain.push_back(f[start + i * stride]);
      found += greedy_neighbor_pairs(LineFunction(chain, f.range_bound())).size();
    }
    best = std::max(best, found);
  }
  return best;
}

inline int cmd_grid(const GridOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.input.empty() == o.dist.dist.empty()) throw UsageError("grid needs exactly one of --input or --dist");
  if (o.d < 1 || o.b < 1 || o.d * o.b > 24) throw UsageError("grid needs d, b >= 1 and d * b <= 24");
  std::optional<LineFunction> f;
  Json spec{{"command", "grid"}, {"d", o.d}, {"b", o.b}, {"seed", g.seed}};
  std::optional<Rational> eps;
  if (!o.input.empty()) {
    f = load_function(o.input);
    spec["input"] = o.input;
  } else {
    const auto id = checked_dist(o.dist);
    Rng rng = derive_stream(g.seed, 0);
    f = sample(id, scaled_params(o.dist), rng);
    spec.update(dist_json(o.dist));
    if (id.is_scaled()) eps = scaled_params(o.dist).epsilon();
  }
  const std::size_t n = std::size_t{1} << (o.d * o.b);
  if (f->size() != n) {
    throw UsageError("function has " + std::to_string(f->size()) + " points, grid needs 2^(d*b) = " + std::to_string(n));
  }
  Json doc{{"schema", 1}, {"spec", spec}, {"n", n}};
  if (eps) {
    doc["eps"] = rational_string(*eps);
    doc["eps_n"] = rational_string(*eps * Rational(BigInt(n)));
  }
  doc["axis_chain_pairs"] = axis_chain_pairs(*f, o.d, o.b);
  if (o.d == 1) {
    doc["violating_pairs"] = nullptr;
    doc["disjoint_pairs"] = greedy_neighbor_pairs(*f).size();
    doc["exact_distance"] = distance_to_monotone_line(*f);
  } else if (n <= kMatchingOracleCap) {
    const auto order = regrouped_order(o.d, o.b);
    doc["violating_pairs"] = violating_pairs(*f, order).size();
    doc["disjoint_pairs"] = maximal_disjoint_violations(*f, order).size();
    doc["exact_distance"] = distance_to_monotone_poset_by_matching(*f, order);
  } else {
    // Past the exact-oracle cap only the linear-time lower bound is reported.
    doc["violating_pairs"] = nullptr;
    doc["disjoint_pairs"] = nullptr;
    doc["exact_distance"] = nullptr;
  }
  doc["tool"] = tool_json();
  emit_json(doc, g, out);
  return kOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentOptions {
  std::string algo = "improved";
  std::string eps = "1/2";
  std::uint32_t c = 6;
  std::string yes;
  std::string no;
  std::size_t trials = 100;
  std::optional<std::size_t> budget;
  std::size_t k = 8;
  std::uint32_t m = 5;
  std::size_t ell = 1;
};

inline int cmd_experiment(const ExperimentOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.trials == 0) throw UsageError("--trials must be positive");
  TesterConfig config;
  config.epsilon = parse_rational(o.eps);
  config.c = o.c;
  config.seed = g.seed;
  const ScaledParams params(o.ell, MuParams(o.k, o.m));
  const auto yes = DistributionId::parse(!o.yes.empty() ? o.yes : (o.ell > 1 ? "mu-tilde" : "mu"));
  const auto no = DistributionId::parse(!o.no.empty() ? o.no : (o.ell > 1 ? "nu-tilde" : "nu"));
  yes.validate(params);
  no.validate(params);
  per_run_budget(o.algo, config, params.domain_size());  // surfaces eps * n < 2 early
  const std::string algo = o.algo;
  const Tester tester = [algo, config](QueryOracle& oracle, Rng& rng) { return run_tester(algo, oracle, config, rng); };
  const auto gap = distinguishing_experiment(tester, yes, no, params, o.trials, g.seed, o.budget);
  Json spec{{"command", "experiment"}, {"algo", o.algo}, {"eps", rational_string(config.epsilon)}, {"c", o.c},
            {"yes", yes.name()}, {"no", no.name()}, {"k", o.k}, {"m", o.m}, {"ell", o.ell},
            {"trials", o.trials}, {"seed", g.seed}};
  spec["budget"] = o.budget ? Json(*o.budget) : Json(nullptr);
  Json doc{{"schema", 1},
           {"spec", spec},
           {"accept_yes", gap.accept_yes},
           {"accept_no", gap.accept_no},
           {"gap", gap.gap},
           {"mean_queries_yes", gap.mean_queries_yes},
           {"mean_queries_no", gap.mean_queries_no},
           {"max_queries", gap.max_queries},
           {"tool", tool_json()}};
  emit_json(doc, g, out);
  return kOk;
}

// ---------------------------------------------------------------- entry

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monotonicity testing on the line and hypergrid", "monotest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  GlobalOptions g;
  app.add_option("--seed", g.seed, "base seed")->capture_default_str();
  app.add_option("--out", g.out, "write the primary output to this path");
  app.add_flag("--json", g.json, "machine-readable output");
  app.fallthrough();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "sample a function from a hard distribution");
  add_dist_options(gen_cmd, gen.dist, true);
  gen_cmd->add_flag("--with-distance", gen.with_distance, "print the exact distance to monotone");

  std::string dist_input;
  auto* dist_cmd = app.add_subcommand("dist", "exact distance of a function file");
  dist_cmd->add_option("--input", dist_input, "function file")->required();

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "run a tester for several trials");
  test_cmd->add_option("--algo", test.algo)->check(CLI::IsMember({"improved", "ergun", "exhaustive"}))->capture_default_str();
  test_cmd->add_option("--eps", test.eps, "rational p/q")->capture_default_str();
  test_cmd->add_option("--c", test.c, "iterations are ceil(c / eps)")->capture_default_str();
  test_cmd->add_option("--trials", test.trials)->capture_default_str();
  test_cmd->add_option("--threads", test.threads)->capture_default_str();
  test_cmd->add_option("--input", test.input, "function file");
  add_dist_options(test_cmd, test.dist, false);

  std::string pairs_input, pairs_eps = "1/2";
  auto* pairs_cmd = app.add_subcommand("pairs", "disjoint violating pairs of an eps-far function");
  pairs_cmd->add_option("--input", pairs_input, "function file")->required();
  pairs_cmd->add_option("--eps", pairs_eps, "rational p/q")->capture_default_str();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "machine-check a lemma of the lower-bound construction");
  verify_cmd->add_option("--lemma", verify.lemma)
      ->required()
      ->check(CLI::IsMember({"cut", "goodalpha", "claim-good", "claim-bad", "nonmonotone"}));
  verify_cmd->add_option("--k", verify.k)->capture_default_str();
  verify_cmd->add_option("--m", verify.m)->capture_default_str();
  verify_cmd->add_flag("--exhaustive", verify.exhaustive);
  verify_cmd->add_option("--trials", verify.trials)->capture_default_str();
  verify_cmd->add_option("--weight", verify.weight, "check only this weight");
  verify_cmd->add_option("--q", verify.q, "queries for claim-bad (default k/2)");

  GridOptions grid;
  auto* grid_cmd = app.add_subcommand("grid", "regroup a line function onto [2^b]^d");
  grid_cmd->add_option("--d", grid.d)->capture_default_str();
  grid_cmd->add_option("--b", grid.b)->capture_default_str();
  grid_cmd->add_option("--input", grid.input, "function file");
  add_dist_options(grid_cmd, grid.dist, false);

  ExperimentOptions exp;
  auto* exp_cmd = app.add_subcommand("experiment", "acceptance gap of a tester between two distributions");
  exp_cmd->add_option("--algo", exp.algo)->check(CLI::IsMember({"improved", "ergun", "exhaustive"}))->capture_default_str();
  exp_cmd->add_option("--eps", exp.eps, "rational p/q")->capture_default_str();
  exp_cmd->add_option("--c", exp.c)->capture_default_str();
  exp_cmd->add_option("--yes", exp.yes, "monotone side (default mu or mu-tilde)");
  exp_cmd->add_option("--no", exp.no, "far side (default nu or nu-tilde)");
  exp_cmd->add_option("--trials", exp.trials)->capture_default_str();
  exp_cmd->add_option("--budget", exp.budget, "cap on distinct queries per run");
  exp_cmd->add_option("--k", exp.k)->capture_default_str();
  exp_cmd->add_option("--m", exp.m)->capture_default_str();
  exp_cmd->add_option("--ell", exp.ell)->capture_default_str();

  std::vector<std::string> argv_storage{"monotest"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "monotest: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, g, out, err);
    if (*dist_cmd) return cmd_dist(dist_input, g, out);
    if (*test_cmd) return cmd_test(test, g, out);
    if (*pairs_cmd) return cmd_pairs(pairs_input, pairs_eps, g, out, err);
    if (*verify_cmd) return cmd_verify(verify, g, out);
    if (*grid_cmd) return cmd_grid(grid, g, out);
    if (*exp_cmd) return cmd_experiment(exp, g, out);
  } catch (const ConfigError& e) {
    err << "monotest: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "monotest: parse error at " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "monotest: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace monotest::cli
