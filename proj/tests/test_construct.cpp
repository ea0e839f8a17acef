#include "doctest.h"
#include "generators.hpp"
#include "hegel/construct.hpp"

using namespace hegel;
using K = Symbol::Kind;

namespace {

struct Example {
  Library lib = parse_library(testgen::example_library());
  Query query = parse_query(testgen::example_query(), &lib);
  ConstructionState cs = wf_init(lib, query);
};

int term_named(const LTA& a, const std::string& name) {
  for (int q = 0; q < a.state_count(); ++q)
    if (a.state(q).alive && a.state(q).role == State::Role::Term && a.state(q).name == name) return q;
  return -1;
}

// App transition applying the term state `fun` to `arg`, or -1.
int app_of(const LTA& a, int fun, int arg) {
  for (int d : a.by_symbol(K::App)) {
    const Transition& t = a.transition(d);
    if (t.alive && t.children.at(1) == fun && t.children.at(2) == arg) return d;
  }
  return -1;
}

}  // namespace

TEST_CASE("wf_init: example library") {
  Example ex;
  const LTA& a = ex.cs.lta;
  CHECK(a.depth == 0);
  CHECK(a.finals == std::set<int>{ex.cs.goal});
  for (const char* n : {"f", "xs", "ys", "g"}) CHECK_MESSAGE(term_named(a, n) >= 0, n);
  int xs = term_named(a, "xs");
  CHECK(a.state(xs).size == 0);
  CHECK(pretty(a.state(xs).type) == pretty(canonical_type(parse_type("{v : [int] | len v = 1}", &ex.lib), false)));
  // xs already inhabits the goal at size 0.
  CHECK(a.incoming(ex.cs.goal).size() == 1);
}

TEST_CASE("wf_init: identical types share a state") {
  Example ex;
  const LTA& a = ex.cs.lta;
  int ysType = a.state(term_named(a, "ys")).typeState;
  int gType = a.state(term_named(a, "g")).typeState;
  CHECK(ysType != gType);
  const Transition& arrow = a.transition(a.incoming(gType).at(0));
  CHECK(arrow.children.at(1) == ysType);
}

TEST_CASE("transition_step: round one applies f to xs and ys") {
  Example ex;
  transition_step(ex.cs);
  const LTA& a = ex.cs.lta;
  CHECK(a.depth == 1);
  int f = term_named(a, "f");
  CHECK(app_of(a, f, term_named(a, "xs")) >= 0);
  CHECK(app_of(a, f, term_named(a, "ys")) >= 0);
  CHECK(app_of(a, term_named(a, "g"), term_named(a, "ys")) >= 0);
  CHECK(app_of(a, term_named(a, "g"), term_named(a, "xs")) < 0);
  for (int d = 0; d < a.transition_count(); ++d)
    if (a.transition(d).alive && a.transition(d).sym.kind == K::App)
      CHECK(a.state(a.transition(d).target).size == 1);
}

TEST_CASE("plan_app: polymorphic instantiation and result refinement") {
  Example ex;
  int f = term_named(ex.cs.lta, "f");
  int xs = term_named(ex.cs.lta, "xs");
  auto plan = plan_app(ex.cs, f, xs);
  REQUIRE(plan);
  REQUIRE(plan->alpha.size() == 1);
  CHECK(plan->alpha.begin()->second == BaseType::Int());
  REQUIRE(plan->result->kind == RType::Kind::Base);
  CHECK(plan->result->base == BaseType::List(BaseType::Int()));

  Oracle o(OracleConfig{}, ex.lib.predicates);
  Context env = build_env(ex.cs.lta);
  QualP one = parse_qual("len v = 1", &ex.lib);
  CHECK(entails(o, env, {}, plan->kappa, qual_rename(one, "v", kNu), plan->result->base, kNu).is_valid());
}

TEST_CASE("plan_app: monomorphic function has no instantiation") {
  Example ex;
  auto plan = plan_app(ex.cs, term_named(ex.cs.lta, "g"), term_named(ex.cs.lta, "ys"));
  REQUIRE(plan);
  CHECK(plan->alpha.empty());
}

TEST_CASE("plan_app: shape mismatch") {
  Example ex;
  CHECK_FALSE(plan_app(ex.cs, term_named(ex.cs.lta, "g"), term_named(ex.cs.lta, "xs")));
}

TEST_CASE("transition_step: library without functions") {
  Library lib = parse_library("a : {v : int | v > 0}\nb : bool\n");
  Query q = parse_query("goal : {v : int | v > 1}", &lib);
  ConstructionState cs = wf_init(lib, q);
  int before = cs.lta.transition_count();
  auto created = transition_step(cs);
  CHECK(created.empty());
  CHECK(cs.lta.transition_count() == before);
  CHECK(cs.lta.depth == 1);
}

TEST_CASE("build_env: bindings of term states") {
  Library lib = parse_library("x : {v : int | 10 >= v /\\ v >= 0}\n");
  Query q = parse_query("goal : {v : int | v >= 0}", &lib);
  ConstructionState cs = wf_init(lib, q);
  Context env = build_env(cs.lta);
  bool found = false;
  for (auto& [n, t] : env)
    if (n == "x") {
      found = true;
      CHECK(pretty(t) == pretty(canonical_type(lib.components[0].second, false)));
    }
  CHECK(found);

  LTA empty;
  CHECK(build_env(empty).empty());
}

TEST_CASE("wf_init: ill-formed query") {
  Library lib = parse_library("a : int\n");
  Query q = parse_query("goal : (x : int) -> int -> int", &lib);
  q.result = parse_type("(y : int) -> int");
  CHECK_THROWS_AS(wf_init(lib, q), IllFormedType);
}

TEST_CASE("canonical_type: flexible type variables") {
  RTypeP t = canonical_type(parse_type("(x : a) -> (y : [b]) -> {v : [a] | true}"), true);
  std::set<std::string> vars;
  collect_type_tyvars(t, vars);
  CHECK(vars == std::set<std::string>{"'0", "'1"});
  for (auto& v : vars) CHECK(is_flexible(v));
  TyInst s;
  CHECK(unify(BaseType::List(BaseType::Var("'0")), BaseType::List(BaseType::Int()), s));
  CHECK(resolve_tyvars(BaseType::Var("'0"), s) == BaseType::Int());
  TyInst s2;
  CHECK_FALSE(unify(BaseType::List(BaseType::Int()), BaseType::Bool(), s2));
}

TEST_CASE("infer_transition_types: placeholder resolves to the planned type") {
  Example ex;
  int f = term_named(ex.cs.lta, "f");
  int xs = term_named(ex.cs.lta, "xs");
  int d = add_placeholder_app(ex.cs, f, xs);
  REQUIRE(d >= 0);
  Inference inf = infer_transition_types(ex.cs, d);
  REQUIRE(inf.transition >= 0);
  CHECK(inf.alpha.size() == 1);
  const Transition& t = ex.cs.lta.transition(inf.transition);
  const State& ty = ex.cs.lta.state(t.children.at(0));
  REQUIRE(ty.type);
  CHECK(ty.type->base == BaseType::List(BaseType::Int()));
}
