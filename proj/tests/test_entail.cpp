#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hegel/entail.hpp"

using namespace hegel;

namespace {

const Library& sig() {
  static const Library lib = parse_library(
      "pred len : [a] -> int\n"
      "pred mod : int -> int\n");
  return lib;
}

QualP q(const std::string& text) { return parse_qual(text, &sig()); }

BaseType int_list() { return BaseType::List(BaseType::Int()); }

Context xs_context() {
  return {{"xs", parse_type("{v : [int] | len v = 1}", &sig())}};
}

// Runs a whole script through a fresh solver process; returns the first line.
std::string solve(const std::string& script) {
  const std::string path = "/tmp/hegel_test_script.smt2";
  std::ofstream(path) << script;
  FILE* p = popen((default_smt_cmd() + " < " + path).c_str(), "r");
  REQUIRE(p);
  char buf[256] = {0};
  std::string out = fgets(buf, sizeof buf, p) ? buf : "";
  pclose(p);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

}  // namespace

TEST_CASE("interpret_context") {
  CHECK(pretty(interpret_context(xs_context())) == pretty(q("len xs = 1")));
  CHECK(is_true(interpret_context({})));
  Context arrows = {{"f", parse_type("(x : int) -> {v : int | v > x}")}};
  CHECK(is_true(interpret_context(arrows)));
}

TEST_CASE("oracle: appendix fixtures") {
  Oracle o(OracleConfig{}, sig().predicates);
  CHECK(entails(o, xs_context(), {}, q("len v = 1"), q("len v > 0"), int_list()).is_valid());
  CHECK(entails(o, {}, {}, q("v >= 1"), q("mod v >= 0"), BaseType::Int()).is_invalid());
}

TEST_CASE("oracle: reflexivity and cache accounting") {
  Oracle o(OracleConfig{}, sig().predicates);
  QualP phi = q("v > 3 /\\ len xs = v");
  CHECK(entails(o, xs_context(), {}, phi, phi, BaseType::Int()).is_valid());
  QualP weaker = q("v > 2");
  auto before = o.stats();
  CHECK(entails(o, xs_context(), {}, phi, weaker, BaseType::Int()).is_valid());
  CHECK(entails(o, xs_context(), {}, phi, weaker, BaseType::Int()).is_valid());
  auto after = o.stats();
  CHECK(after.cacheHits >= before.cacheHits + 1);
  CHECK(after.queriesIssued <= before.queriesIssued + 1);
}

TEST_CASE("oracle: binder renaming shares a cache entry") {
  Oracle o(OracleConfig{}, sig().predicates);
  Context a = {{"p", parse_type("{v : int | v > 0}")}};
  Context b = {{"r", parse_type("{v : int | v > 0}")}};
  CHECK(entails(o, a, {}, q("v = p + 1"), q("v > 1"), BaseType::Int()).is_valid());
  long hits = o.stats().cacheHits;
  CHECK(entails(o, b, {}, q("v = r + 1"), q("v > 1"), BaseType::Int()).is_valid());
  CHECK(o.stats().cacheHits == hits + 1);
}

TEST_CASE("oracle: same key, same verdict") {
  EntailmentQuery a;
  a.antecedent = q("v >= 0 /\\ v < 10");
  a.consequent = q("v < 11");
  a.valueSort = BaseType::Int();
  EntailmentQuery b = a;
  b.antecedent = q("v < 10 /\\ 0 <= v");
  CHECK(canonical_key(a) == canonical_key(b));
}

TEST_CASE("encode_smtlib answers") {
  EntailmentQuery valid;
  valid.context = xs_context();
  valid.antecedent = q("len v = 1");
  valid.consequent = q("len v > 0");
  valid.valueSort = int_list();
  CHECK(solve(encode_smtlib(valid, sig().predicates)) == "unsat");

  EntailmentQuery trivial;
  trivial.antecedent = q_true();
  trivial.consequent = q_true();
  trivial.valueSort = BaseType::Int();
  CHECK(solve(encode_smtlib(trivial, {})) == "unsat");

  EntailmentQuery invalid;
  invalid.antecedent = q("v >= 1");
  invalid.consequent = q("mod v >= 0");
  invalid.valueSort = BaseType::Int();
  CHECK(solve(encode_smtlib(invalid, sig().predicates)) == "sat");
}

TEST_CASE("fallback prover") {
  EntailmentQuery e;
  e.valueSort = BaseType::Int();
  e.antecedent = q("v > 0");
  e.consequent = q_true();
  CHECK(fallback_prove(e).is_valid());
  e.antecedent = q("v > 0 /\\ v < 5");
  e.consequent = q("v > 0");
  CHECK(fallback_prove(e).is_valid());
  e.valueSort = int_list();
  e.antecedent = q("len v = 1");
  e.consequent = q("len v > 0");
  CHECK(fallback_prove(e).is_unknown());
}

TEST_CASE("oracle: missing solver falls back") {
  OracleConfig cfg;
  cfg.smtCmd = "/nonexistent/solver";
  Oracle o(cfg, sig().predicates);
  CHECK(entails(o, {}, {}, q("v > 0 /\\ v < 3"), q("v > 0"), BaseType::Int()).is_valid());
  CHECK(entails(o, {}, {}, q("v > 1"), q("v > 0"), BaseType::Int()).is_unknown());
  CHECK(o.stats().fallbacks >= 1);
}

TEST_CASE("slice_context keeps the cone of influence") {
  EntailmentQuery e;
  e.context = {{"a", parse_type("{v : int | v > b}")},
               {"b", parse_type("{v : int | v > 0}")},
               {"c", parse_type("{v : int | v > 7}")}};
  e.antecedent = q("v = a");
  e.consequent = q("v > 0");
  e.valueSort = BaseType::Int();
  Context s = slice_context(e);
  REQUIRE(s.size() == 2);
  CHECK(s[0].first == "a");
  CHECK(s[1].first == "b");
}
