#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "hegel/check.hpp"
#include "hegel/cli.hpp"
#include "hegel/engine.hpp"

using namespace hegel;

namespace {

const std::string kFixtures = HEGEL_FIXTURES;

std::set<std::string> keys(const std::vector<TermP>& ts) {
  std::set<std::string> out;
  for (auto& t : ts) out.insert(alpha_key(t));
  return out;
}

std::string key(const std::string& text) { return alpha_key(parse_term(text)); }

SynthesisResult run(const std::string& libText, const std::string& queryText, int k,
                    SynthesisConfig cfg = {}) {
  Library lib = parse_library(libText);
  Query q = parse_query(queryText, &lib);
  cfg.k = k;
  Oracle o;
  return lta_synthesize(lib, q, cfg, o);
}

}  // namespace

TEST_CASE("config validation") {
  SynthesisConfig cfg;
  cfg.k = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.k = 1;
  cfg.maxTerms = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.maxTerms = 1;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("argument variable at size zero") {
  auto r = run("", "goal : int -> int", 0);
  REQUIRE(r.solved);
  CHECK(keys(r.terms).count(key("fun x -> x")) == 1);
  CHECK(r.stats.rounds == 0);
}

TEST_CASE("unreachable result type is bottom") {
  auto r = run("inc : (x : int) -> {v : int | v = x + 1}\n", "goal : (a : int) -> [int]", 2);
  CHECK_FALSE(r.solved);
  CHECK(r.terms.empty());
  CHECK(r.stats.rounds == 2);
}

TEST_CASE("example library: xs already solves the goal") {
  auto r = run(testgen::example_library(), testgen::example_query(), 1);
  REQUIRE(r.solved);
  CHECK(keys(r.terms).count(key("xs")) == 1);
  for (auto& t : r.terms) CHECK(pretty(t).find("ys") == std::string::npos);
}

TEST_CASE("refinements separate arguments of one base type") {
  const std::string lib =
      "pred len : [a] -> int\n"
      "f : (l : {v : [a] | len v > 0}) -> {v : [a] | len v = len l + 1}\n"
      "xs : {v : [int] | len v = 1}\n"
      "ys : [int]\n";
  auto r = run(lib, "goal : {v : [int] | len v = 2}", 1);
  REQUIRE(r.solved);
  auto ks = keys(r.terms);
  CHECK(ks.count(key("f xs")) == 1);
  CHECK(ks.count(key("f ys")) == 0);
}

TEST_CASE("motivating fixture") {
  Library lib = parse_library(read_file(kFixtures + "/motivating/lib.spec"));
  Query q = parse_query(read_file(kFixtures + "/motivating/query.spec"), &lib);
  SynthesisConfig cfg;
  cfg.k = 3;
  Oracle o;
  auto r = lta_synthesize(lib, q, cfg, o);
  REQUIRE(r.solved);
  CHECK(keys(r.terms).count(key("fun x y z -> splitAt x (drop y z)")) == 1);
  CHECK(r.stats.discrepancies.empty());
}

TEST_CASE("every returned term type checks") {
  Library lib = parse_library(read_file(kFixtures + "/suite/abs.lib"));
  Query q = parse_query(read_file(kFixtures + "/suite/abs.query"), &lib);
  SynthesisConfig cfg;
  cfg.k = 3;
  Oracle o;
  auto r = lta_synthesize(lib, q, cfg, o);
  REQUIRE(r.solved);
  Oracle fresh(OracleConfig{}, lib.predicates);
  for (auto& t : r.terms) CHECK_MESSAGE(type_check(library_context(lib), t, q.as_type(), fresh, nullptr, &lib), pretty(t));
}

TEST_CASE("denote at depth two equals checked brute force") {
  Library lib = parse_library(testgen::example_library());
  Query q = parse_query(testgen::example_query(), &lib);
  ConstructionOptions opts;
  opts.conditionals = false;
  ConstructionState cs = wf_init(lib, q, opts);
  transition_step(cs);
  transition_step(cs);
  Oracle o(OracleConfig{}, lib.predicates);
  Context env = build_env(cs.lta);
  TransitionChecker tc(cs.lta, env, o);
  SynthesisConfig cfg;
  cfg.maxTerms = 1000;
  RunStats st;
  auto engine = extract_terms(cs, lib, q, cfg, tc, o, st);
  CHECK(st.discrepancies.empty());

  BruteOptions bo;
  bo.conditionals = false;
  auto brute = brute_force_synthesize(lib, q, 2, o, bo);
  CHECK(keys(engine) == keys(brute));
  CHECK(keys(brute).count(key("f (f xs)")) == 1);
}

TEST_CASE("ablation variants agree on solvability") {
  Library lib = parse_library(read_file(kFixtures + "/suite/arith.lib"));
  Query q = parse_query(read_file(kFixtures + "/suite/arith.query"), &lib);
  std::map<std::string, std::uint64_t> enumerated;
  for (Variant v : {Variant::Full, Variant::NoPrune, Variant::NoSimilarity, Variant::None}) {
    SynthesisConfig cfg = apply_variant(SynthesisConfig{}, v);
    cfg.k = 3;
    Oracle o;
    auto r = lta_synthesize(lib, q, cfg, o);
    CHECK(r.solved);
    enumerated[variant_name(v)] = r.stats.termsEnumerated;
  }
  CHECK(enumerated["full"] <= enumerated["noPrune"]);
  CHECK(enumerated["noPrune"] <= enumerated["none"]);
  CHECK(enumerated["full"] <= enumerated["noSimilarity"]);
  CHECK(enumerated["noSimilarity"] <= enumerated["none"]);
}

TEST_CASE("stats json schema") {
  auto r = run(testgen::example_library(), testgen::example_query(), 1);
  auto j = stats_json(r.stats);
  CHECK(j.at("schema") == 1);
  for (const char* k : {"statesBeforeMin", "statesAfterMin", "transitionsMerged", "transitionsPruned",
                        "smtQueries", "cacheHits", "termsEnumerated", "wallMillis"})
    CHECK_MESSAGE(j.contains(k), k);
  for (const char* k : {"construct", "prune", "similarity", "minimize", "nempty", "extract", "smt"})
    CHECK_MESSAGE(j.at("wallMillis").contains(k), k);
}

TEST_CASE("runs are deterministic") {
  auto a = run(testgen::example_library(), "goal : {v : [int] | len v = 1}", 2);
  auto b = run(testgen::example_library(), "goal : {v : [int] | len v = 1}", 2);
  std::vector<std::string> ta, tb;
  for (auto& t : a.terms) ta.push_back(pretty(t));
  for (auto& t : b.terms) tb.push_back(pretty(t));
  CHECK(ta == tb);
  auto ja = stats_json(a.stats), jb = stats_json(b.stats);
  ja.erase("wallMillis");
  jb.erase("wallMillis");
  CHECK(ja == jb);
}
