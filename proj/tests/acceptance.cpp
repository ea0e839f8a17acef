// Acceptance runner: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "hegel/check.hpp"
#include "hegel/cli.hpp"
#include "hegel/engine.hpp"

using namespace hegel;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::string kFixtures = HEGEL_FIXTURES;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void note(const std::string& s) { std::cout << "  " << s << "\n"; }

std::vector<PredDecl> signature_preds(const Library& lib, const Query& q) {
  std::vector<PredDecl> out = lib.predicates;
  for (auto& p : q.predicates) out.push_back(p);
  return out;
}

std::vector<QualP> signature_axioms(const Library& lib, const Query& q) {
  std::vector<QualP> out = lib.axioms;
  for (auto& a : q.axioms) out.push_back(a);
  return out;
}

Library with_query_constants(const Library& lib, const Query& q) {
  Library out = lib;
  for (auto& c : q.constants) out.constants.push_back(c);
  return out;
}

// Re-checks every returned term with a fresh oracle; returns the failures.
std::vector<std::string> recheck(const Library& lib, const Query& q, const std::vector<TermP>& terms) {
  Oracle fresh(OracleConfig{}, signature_preds(lib, q), signature_axioms(lib, q));
  Library checkLib = with_query_constants(lib, q);
  CheckContext ctx = library_context(checkLib);
  std::vector<std::string> bad;
  for (auto& t : terms) {
    std::string why;
    if (!type_check(ctx, t, q.as_type(), fresh, &why, &checkLib)) bad.push_back(pretty(t) + ": " + why);
  }
  return bad;
}

nlohmann::json untimed(const RunStats& s) {
  nlohmann::json j = stats_json(s);
  j.erase("wallMillis");
  return j;
}

struct SuiteRun {
  BenchSpec spec;
  Library lib;
  Query query;
  SynthesisResult first, second;
  double firstSecs = 0;
};

// ---------------------------------------------------------------- criteria

void criterion1(const std::vector<SuiteRun>& runs) {
  auto t0 = Clock::now();
  double suiteSecs = 0;
  for (auto& r : runs) suiteSecs += r.firstSecs;
  long checked = 0;
  std::vector<std::string> bad;
  for (auto& r : runs) {
    for (auto& d : r.first.stats.discrepancies) bad.push_back(r.spec.name + " (engine): " + d);
    for (auto& b : recheck(r.lib, r.query, r.first.terms)) bad.push_back(r.spec.name + ": " + b);
    checked += static_cast<long>(r.first.terms.size());
  }
  std::mt19937 rng(1001);
  int randomSolved = 0;
  for (int i = 0; i < 20; ++i) {
    auto inst = testgen::random_instance(rng, 2 + i % 5, 3);
    SynthesisConfig cfg;
    cfg.k = inst.k;
    Oracle oracle;
    SynthesisResult res = lta_synthesize(inst.lib, inst.query, cfg, oracle);
    if (res.solved) ++randomSolved;
    for (auto& d : res.stats.discrepancies) bad.push_back(inst.name + " (engine): " + d);
    for (auto& b : recheck(inst.lib, inst.query, res.terms)) bad.push_back(inst.name + ": " + b);
    checked += static_cast<long>(res.terms.size());
  }
  double secs = seconds_since(t0) + suiteSecs;
  for (auto& b : bad) note(b);
  std::ostringstream os;
  os << checked << " terms re-checked (" << randomSolved << "/20 random instances solved), "
     << bad.size() << " failures, " << secs << " s total";
  report(1, bad.empty() && secs < 300, os.str());
}

void criterion2() {
  auto t0 = Clock::now();
  std::mt19937 rng(2002);
  int agree = 0, disagree = 0, skipped = 0, solvedCount = 0;
  for (int i = 0; i < 40; ++i) {
    auto inst = testgen::random_instance(rng, 1 + i % 5, 3);
    SynthesisConfig cfg;
    cfg.k = inst.k;
    Oracle oracle;
    SynthesisResult res = lta_synthesize(inst.lib, inst.query, cfg, oracle);
    Oracle brute(OracleConfig{}, signature_preds(inst.lib, inst.query),
                 signature_axioms(inst.lib, inst.query));
    BruteOptions bo;
    bo.maxComponents = 5;
    bo.maxTerms = 1;
    auto found = brute_force_synthesize(inst.lib, inst.query, inst.k, brute, bo);
    if (res.stats.unknowns > 0 || brute.stats().unknowns > 0) {
      ++skipped;
      continue;
    }
    if (res.solved) ++solvedCount;
    if (res.solved == !found.empty()) {
      ++agree;
    } else {
      ++disagree;
      note(inst.name + ": engine " + (res.solved ? "solved" : "bottom") + ", brute force " +
           (found.empty() ? "empty" : pretty(found.front())));
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << agree << " agreements (" << solvedCount << " solvable), " << disagree << " disagreements, "
     << skipped << " instances skipped for Unknown verdicts, " << secs << " s";
  report(2, disagree == 0 && agree > 0 && secs < 600, os.str());
}

void criterion3() {
  Library lib = parse_library(read_file(kFixtures + "/motivating/desk_lib.spec"));
  Query q = parse_query(read_file(kFixtures + "/motivating/query.spec"), &lib);
  SynthesisConfig cfg;
  cfg.k = 3;
  Oracle oracle;
  auto t0 = Clock::now();
  SynthesisResult res = lta_synthesize(lib, q, cfg, oracle);
  double secs = seconds_since(t0);
  for (auto& t : res.terms) note("found: " + pretty(t));
  bool match = matches_expected(res.terms, {"fun x y z -> splitAt y (drop x z)",
                                            "fun x y z -> splitAt x (take y z)"});
  std::ostringstream os;
  os << lib.components.size() << " components, " << res.terms.size() << " solutions in " << secs
     << " s; α-equivalent to a listed term: " << (match ? "yes" : "no");
  report(3, lib.components.size() >= 20 && match && secs < 60, os.str());
}

void criteria45(const std::vector<BenchSpec>& suite) {
  std::vector<BenchRow> rows;
  SynthesisConfig base;
  for (auto& b : suite)
    for (Variant v : {Variant::Full, Variant::NoPrune, Variant::NoSimilarity, Variant::None})
      rows.push_back(run_bench_item(b, v, base, OracleConfig{}, 180));

  int reduced = 0;
  for (auto& r : rows) {
    if (r.variant != "full") continue;
    double ratio = r.stats.statesBeforeMin > 0
                       ? 100.0 * (r.stats.statesBeforeMin - r.stats.statesAfterMin) / r.stats.statesBeforeMin
                       : 0.0;
    std::ostringstream os;
    os << r.name << ": " << r.stats.statesBeforeMin << " -> " << r.stats.statesAfterMin << " states ("
       << ratio << "% reduction), outcome " << r.outcome;
    note(os.str());
    if (r.outcome == "SOLVED" && r.stats.statesAfterMin < r.stats.statesBeforeMin) ++reduced;
  }
  report(4, reduced >= 8, std::to_string(reduced) + "/" + std::to_string(suite.size()) +
                              " benchmarks reduced the final-round state count");

  auto violations = monotonicity_violations(rows);
  std::map<std::string, std::map<std::string, const BenchRow*>> byName;
  for (auto& r : rows) byName[r.name][r.variant] = &r;
  int strict = 0, errors = 0;
  for (auto& [name, vs] : byName) {
    for (auto& [v, r] : vs)
      if (r->outcome != "SOLVED" && r->outcome != "BOTTOM") {
        ++errors;
        note(name + " " + v + ": " + r->outcome + " " + r->error);
      }
    const BenchRow* full = vs["full"];
    const BenchRow* none = vs["none"];
    std::ostringstream os;
    os << name << ": full " << full->stats.termsEnumerated << ", noPrune " << vs["noPrune"]->stats.termsEnumerated
       << ", noSimilarity " << vs["noSimilarity"]->stats.termsEnumerated << ", none "
       << none->stats.termsEnumerated;
    note(os.str());
    if (full->stats.termsEnumerated < none->stats.termsEnumerated) ++strict;
  }
  for (auto& v : violations) note("violation: " + v);
  std::ostringstream os;
  os << violations.size() << " chain violations, strict full < none on " << strict << "/" << byName.size()
     << ", " << errors << " errored rows";
  report(5, violations.empty() && errors == 0 && strict >= 8, os.str());
}

std::set<std::string> goal_terms(const LTA& a, int goal, int maxSize, TransitionChecker& tc) {
  DenoteBudget b;
  b.maxSize = maxSize;
  b.maxTerms = 100000;
  std::set<std::string> out;
  for (auto& t : denote(a, goal, b, tc)) out.insert(pretty(canonical_binders(to_anf(tree_to_term(t)))));
  return out;
}

std::vector<RTypeP> goal_solution_types(const LTA& a, int goal, int maxSize, TransitionChecker& tc) {
  DenoteBudget b;
  b.maxSize = maxSize;
  b.maxTerms = 100000;
  std::vector<RTypeP> out;
  for (auto& t : denote(a, goal, b, tc)) out.push_back(a.state(t->kids.at(1)->state).type);
  return out;
}

void criterion6() {
  std::mt19937 rng(6006);
  int automata = 0, pruneViolations = 0, subsetViolations = 0, prunedSomething = 0, merged = 0;
  while (automata < 50) {
    auto inst = testgen::random_instance(rng, 2 + automata % 4, 2);
    ConstructionState cs = wf_init(inst.lib, inst.query);
    std::vector<PredDecl> preds = signature_preds(inst.lib, inst.query);
    for (auto& p : cs.predVars) preds.push_back(p);
    Oracle oracle(OracleConfig{}, preds, signature_axioms(inst.lib, inst.query));
    for (int r = 0; r < inst.k; ++r) transition_step(cs);
    ++automata;
    int depth = cs.lta.depth;

    Context env = build_env(cs.lta);
    std::set<std::string> before, after;
    {
      TransitionChecker tc(cs.lta, env, oracle);
      before = goal_terms(cs.lta, cs.goal, depth, tc);
    }
    ConstructionState pruned = cs;
    ReductionStats rs;
    {
      TransitionChecker tc(pruned.lta, env, oracle);
      prune(pruned.lta, tc, rs);
    }
    {
      TransitionChecker tc(pruned.lta, env, oracle);
      after = goal_terms(pruned.lta, pruned.goal, depth, tc);
    }
    if (rs.transitionsPruned > 0) ++prunedSomething;
    if (before != after) {
      ++pruneViolations;
      note(inst.name + ": prune changed the goal term set (" + std::to_string(before.size()) + " -> " +
           std::to_string(after.size()) + ")");
    }

    std::vector<RTypeP> pre, post;
    {
      TransitionChecker tc(pruned.lta, env, oracle);
      pre = goal_solution_types(pruned.lta, pruned.goal, depth, tc);
    }
    ConstructionState minimized = pruned;
    SimilaritySet sim;
    ReductionStats ms;
    {
      TransitionChecker tc(minimized.lta, env, oracle);
      similarity(minimized, sim, tc, SimilarityBudget{}, ms);
      minimize(minimized.lta, sim, ms);
    }
    {
      TransitionChecker tc(minimized.lta, env, oracle);
      post = goal_solution_types(minimized.lta, minimized.goal, depth, tc);
    }
    if (ms.transitionsMerged > 0) ++merged;
    CheckContext ctx;
    ctx.bindings = env;
    for (auto& t : pre) {
      bool covered = false;
      for (auto& u : post)
        if (subtype_check(ctx, u, t, oracle)) {
          covered = true;
          break;
        }
      if (!covered) {
        ++subsetViolations;
        note(inst.name + ": no retained solution with a subtype of " + pretty(t));
      }
    }
  }
  std::ostringstream os;
  os << automata << " automata, " << pruneViolations << " prune violations, " << subsetViolations
     << " small-subset violations (" << prunedSomething << " pruned, " << merged << " merged)";
  report(6, pruneViolations == 0 && subsetViolations == 0, os.str());
}

void criterion7(const std::vector<SuiteRun>& runs) {
  int diffs = 0;
  for (auto& r : runs) {
    std::vector<std::string> a, b;
    for (auto& t : r.first.terms) a.push_back(pretty(t));
    for (auto& t : r.second.terms) b.push_back(pretty(t));
    if (a != b || untimed(r.first.stats) != untimed(r.second.stats)) {
      ++diffs;
      note(r.spec.name + ": runs differ");
    }
  }
  report(7, diffs == 0, std::to_string(diffs) + " diffs over " + std::to_string(runs.size()) + " suite items");
}

void criterion8(const std::vector<SuiteRun>& runs) {
  Library sig = parse_library(
      "pred len : [a] -> int\n"
      "pred mod : int -> int\n");
  Oracle oracle(OracleConfig{}, sig.predicates, sig.axioms);
  OracleVerdict v1 = entails(oracle, {}, {}, parse_qual("len v = 1", &sig), parse_qual("len v > 0", &sig),
                             BaseType::List(BaseType::Int()));
  OracleVerdict v2 = entails(oracle, {}, {}, parse_qual("v >= 1", &sig), parse_qual("mod v >= 0", &sig),
                             BaseType::Int());
  bool fixtures = v1.is_valid() && v2.is_invalid();
  if (!v1.is_valid()) note("len(v) = 1 |= len(v) > 0 was not Valid: " + v1.reason);
  if (!v2.is_invalid()) note("v >= 1 |= mod(v) >= 0 was not Invalid: " + v2.reason);
  int multi = 0, hits = 0;
  for (auto& r : runs) {
    if (r.first.stats.rounds < 2) continue;
    ++multi;
    if (r.first.stats.cacheHits > 0) ++hits;
    else note(r.spec.name + ": no cache hits over " + std::to_string(r.first.stats.rounds) + " rounds");
  }
  std::ostringstream os;
  os << "fixtures " << (fixtures ? "ok" : "failed") << " with `" << oracle.config().smtCmd << "`, cache hits on "
     << hits << "/" << multi << " multi-round benchmarks";
  report(8, fixtures && hits == multi, os.str());
}

}  // namespace

int main() {
  try {
    auto suite = load_suite(kFixtures + "/suite/suite.json");
    std::vector<SuiteRun> runs;
    for (auto& b : suite) {
      SuiteRun r;
      r.spec = b;
      r.lib = parse_library(read_file(b.libraryPath));
      r.query = parse_query(read_file(b.queryPath), &r.lib);
      SynthesisConfig cfg;
      cfg.k = b.k;
      {
        Oracle o;
        auto t0 = Clock::now();
        r.first = lta_synthesize(r.lib, r.query, cfg, o);
        r.firstSecs = seconds_since(t0);
      }
      {
        Oracle o;
        r.second = lta_synthesize(r.lib, r.query, cfg, o);
      }
      runs.push_back(std::move(r));
    }
    criterion1(runs);
    criterion2();
    criterion3();
    criteria45(suite);
    criterion6();
    criterion7(runs);
    criterion8(runs);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
