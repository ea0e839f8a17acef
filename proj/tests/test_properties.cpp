// Randomized checks of structural invariants.
#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "hegel/check.hpp"
#include "hegel/engine.hpp"

using namespace hegel;
using K = Symbol::Kind;

namespace {

void arg_binders(const RTypeP& t, std::vector<std::string>& out) {
  if (t->kind == RType::Kind::Arrow) {
    out.push_back(t->argName);
    arg_binders(t->argType, out);
    arg_binders(t->resType, out);
  } else if (t->kind == RType::Kind::ForallTy || t->kind == RType::Kind::ForallPred) {
    arg_binders(t->body, out);
  }
}

TermP random_term(std::mt19937& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  const char* names[] = {"f", "g", "x", "y", "zs"};
  if (depth == 0 || pick(3) == 0) {
    if (pick(4) == 0) return e_const(Literal{Literal::Kind::Int, pick(20)});
    return e_var(names[pick(5)]);
  }
  if (pick(5) == 0) return e_if(random_term(rng, depth - 1), random_term(rng, depth - 1), random_term(rng, depth - 1));
  // Applications are headed by a variable, as in synthesized terms.
  TermP t = e_var(names[pick(2)]);
  for (int n = 1 + pick(2); n > 0; --n) t = e_app(t, random_term(rng, depth - 1));
  return t;
}

QualP random_linear(std::mt19937& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto atom = [&]() {
    const char* vars[] = {"v", "a", "b"};
    QualP lhs = q_var(vars[pick(3)]);
    QualP rhs = pick(2) ? q_int(pick(7) - 3) : q_bin(Qual::Kind::Add, q_var(vars[pick(3)]), q_int(pick(3)));
    Qual::Kind ops[] = {Qual::Kind::Eq, Qual::Kind::Le, Qual::Kind::Lt, Qual::Kind::Ge, Qual::Kind::Gt};
    return q_bin(ops[pick(5)], lhs, rhs);
  };
  if (depth == 0) return atom();
  std::vector<QualP> parts;
  int n = 1 + pick(3);
  for (int i = 0; i < n; ++i) parts.push_back(pick(4) ? atom() : random_linear(rng, depth - 1));
  return pick(3) ? q_and(parts) : q_or(parts);
}

Context int_context() {
  return {{"a", parse_type("{v : int | v >= 0}")}, {"b", parse_type("int")}};
}

// Constructed automaton of a random instance after `rounds` expansion rounds.
struct Built {
  testgen::Instance inst;
  ConstructionState cs;
  Built(std::mt19937& rng, int components, int rounds)
      : inst(testgen::random_instance(rng, components, 2)), cs(wf_init(inst.lib, inst.query)) {
    for (int r = 0; r < rounds; ++r) transition_step(cs);
  }
};

void replay(const SymTreeP& t, const LTA& a, const Context& env, Oracle& o, int& failures) {
  if (t->transition >= 0 && !term_satisfies(t, a.transition(t->transition).psi, env, o)) ++failures;
  for (auto& k : t->kids) replay(k, a, env, o, failures);
}

}  // namespace

TEST_CASE("property: argument binders are pairwise distinct after parsing") {
  std::mt19937 rng(11);
  for (int i = 0; i < 30; ++i) {
    auto inst = testgen::random_instance(rng, 6, 2);
    std::vector<std::string> binders;
    for (auto& [n, t] : inst.lib.components) arg_binders(t, binders);
    std::set<std::string> unique(binders.begin(), binders.end());
    CHECK_MESSAGE(unique.size() == binders.size(), inst.name);
  }
}

TEST_CASE("property: nat is int with a non-negative refinement") {
  Query q = parse_query("goal : (n : nat) -> {v : nat | v > n}");
  RTypeP n = q.args.at(0).second;
  CHECK(n->base == BaseType::Int());
  Oracle o;
  CHECK(entails(o, {}, {}, n->qual, parse_qual(n->var + " >= 0"), BaseType::Int(), n->var).is_valid());
  CHECK(entails(o, {{"n", n}}, {}, q.result->qual, parse_qual(q.result->var + " >= 0"), BaseType::Int(),
                q.result->var).is_valid());
}

TEST_CASE("property: term round trip and ANF") {
  std::mt19937 rng(13);
  for (int i = 0; i < 200; ++i) {
    TermP t = random_term(rng, 4);
    CHECK_MESSAGE(term_equal(parse_term(pretty(t)), t), pretty(t));
    TermP a = to_anf(t);
    CHECK_MESSAGE(anf_valid(a), pretty(a));
    CHECK(term_equal(inline_lets(a), t));
    CHECK(term_equal(canonical_binders(a), canonical_binders(canonical_binders(a))));
  }
}

TEST_CASE("property: fallback prover never contradicts the solver") {
  std::mt19937 rng(17);
  Oracle o;
  int decided = 0;
  for (int i = 0; i < 200; ++i) {
    EntailmentQuery q;
    q.context = int_context();
    q.antecedent = random_linear(rng, 1);
    q.consequent = std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? q.antecedent->kind == Qual::Kind::And
                                                                            ? q.antecedent->kids.front()
                                                                            : q.antecedent
                                                                      : random_linear(rng, 0);
    q.valueSort = BaseType::Int();
    if (!fallback_prove(q).is_valid()) continue;
    ++decided;
    CHECK_MESSAGE(o.check(q).is_valid(), (pretty(q.antecedent) + " |= " + pretty(q.consequent)));
  }
  CHECK(decided > 10);
}

TEST_CASE("property: equal keys give equal verdicts; stats add up") {
  std::mt19937 rng(19);
  Oracle o;
  std::map<std::string, OracleVerdict::Kind> seen;
  std::vector<EntailmentQuery> issued;
  long calls = 0;
  for (int i = 0; i < 150; ++i) {
    EntailmentQuery q;
    if (i % 3 == 2) {
      // Re-issue an earlier query with its conjuncts reversed.
      q = issued[std::uniform_int_distribution<std::size_t>(0, issued.size() - 1)(rng)];
      if (q.antecedent->kind == Qual::Kind::And) {
        std::vector<QualP> kids = q.antecedent->kids;
        std::reverse(kids.begin(), kids.end());
        q.antecedent = q_and(kids);
      }
    } else {
      q.context = int_context();
      q.antecedent = random_linear(rng, 1);
      q.consequent = random_linear(rng, 0);
      q.valueSort = BaseType::Int();
      issued.push_back(q);
    }
    auto before = o.stats();
    OracleVerdict v = o.check(q);
    ++calls;
    auto after = o.stats();
    CHECK(after.queriesIssued >= before.queriesIssued);
    std::string key = canonical_key(q);
    if (after.trivial > before.trivial) continue;
    auto [it, fresh] = seen.emplace(key, v.kind);
    if (!fresh) CHECK(it->second == v.kind);
  }
  const OracleStats& s = o.stats();
  CHECK(s.cacheHits + s.queriesIssued + s.trivial == calls);
  CHECK(s.cacheHits > 0);
}

TEST_CASE("property: constructed automata are well formed") {
  std::mt19937 rng(23);
  for (int i = 0; i < 25; ++i) {
    Built b(rng, 2 + i % 4, 2);
    const LTA& a = b.cs.lta;
    DepGraph g = dependency_graph(a);
    for (int d = 0; d < a.transition_count(); ++d) {
      const Transition& t = a.transition(d);
      if (!t.alive) continue;
      CHECK(arity(t.sym) == static_cast<int>(t.children.size()));
      if (t.sym.kind == K::Bottom) {
        CHECK(t.children.empty());
        CHECK(t.psi->kind == Constraint::Kind::False);
      }
      CHECK(t.target >= 0);
      CHECK(t.target < a.state_count());
      for (int c : t.children) CHECK((c >= 0 && c < a.state_count()));
      CHECK_MESSAGE(constraint_well_formed(a, d, g), (b.inst.name + " d" + std::to_string(d)));
    }
    for (int f : a.finals) CHECK(f < a.state_count());
    for (int q = 0; q < a.state_count(); ++q)
      for (int d : at_position(a, q, {1})) CHECK(a.transition(d).target < a.state_count());
  }
}

TEST_CASE("property: interning makes construction deterministic") {
  std::mt19937 rng(29);
  for (int i = 0; i < 10; ++i) {
    auto inst = testgen::random_instance(rng, 4, 2);
    ConstructionState x = wf_init(inst.lib, inst.query), y = wf_init(inst.lib, inst.query);
    CHECK(dump_text(x.lta) == dump_text(y.lta));
    transition_step(x);
    transition_step(y);
    CHECK(dump_text(x.lta) == dump_text(y.lta));
    std::set<std::string> keys;
    for (int q = 0; q < x.lta.state_count(); ++q)
      if (x.lta.state(q).alive && !x.lta.state(q).key.empty()) CHECK(keys.insert(x.lta.state(q).key).second);
  }
}

TEST_CASE("property: normalize is idempotent and preserves goal terms") {
  std::mt19937 rng(31);
  for (int i = 0; i < 15; ++i) {
    Built b(rng, 3, 2);
    std::vector<PredDecl> preds = b.inst.lib.predicates;
    for (auto& p : b.cs.predVars) preds.push_back(p);
    Oracle o(OracleConfig{}, preds, b.inst.lib.axioms);
    Context env = build_env(b.cs.lta);
    DenoteBudget budget;
    budget.maxSize = 2;
    budget.maxTerms = 10000;
    auto terms = [&](const LTA& a) {
      TransitionChecker tc(a, env, o);
      std::set<std::string> out;
      for (auto& t : denote(a, b.cs.goal, budget, tc)) out.insert(pretty(tree_to_term(t)));
      return out;
    };
    LTA once = b.cs.lta;
    normalize(once);
    LTA twice = once;
    normalize(twice);
    CHECK(dump_text(once) == dump_text(twice));
    CHECK(terms(once) == terms(b.cs.lta));
  }
}

TEST_CASE("property: denoted terms satisfy the constraints of their runs") {
  std::mt19937 rng(37);
  for (int i = 0; i < 15; ++i) {
    Built b(rng, 3, 2);
    std::vector<PredDecl> preds = b.inst.lib.predicates;
    for (auto& p : b.cs.predVars) preds.push_back(p);
    Oracle o(OracleConfig{}, preds, b.inst.lib.axioms);
    Context env = build_env(b.cs.lta);
    TransitionChecker tc(b.cs.lta, env, o);
    DenoteBudget budget;
    budget.maxSize = 2;
    int failures = 0;
    for (auto& t : denote(b.cs.lta, b.cs.goal, budget, tc)) replay(t, b.cs.lta, env, o, failures);
    CHECK_MESSAGE(failures == 0, b.inst.name);
  }
}

TEST_CASE("property: engine output is ANF and type checks on random instances") {
  std::mt19937 rng(41);
  for (int i = 0; i < 10; ++i) {
    auto inst = testgen::random_instance(rng, 3, 2);
    SynthesisConfig cfg;
    cfg.k = inst.k;
    Oracle o;
    auto r = lta_synthesize(inst.lib, inst.query, cfg, o);
    CHECK(r.stats.discrepancies.empty());
    for (auto& t : r.terms) {
      TermP body = t;
      while (body->kind == Term::Kind::Lam) body = body->kids[0];
      CHECK_MESSAGE(anf_valid(body), pretty(t));
    }
  }
}
