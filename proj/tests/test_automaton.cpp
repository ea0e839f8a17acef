#include "doctest.h"
#include "hegel/automaton.hpp"
#include "hegel/construct.hpp"

using namespace hegel;
using K = Symbol::Kind;

namespace {

RTypeP ty(const std::string& text) { return canonical_type(parse_type(text), false); }

SymTreeP pair(const SymTreeP& a, const SymTreeP& b) {
  auto n = std::make_shared<SymTree>();
  n->sym = Symbol::of(K::Pair);
  n->kids = {a, b};
  return n;
}

State type_state_of(const std::string& binder) {
  State s;
  s.role = State::Role::Type;
  s.name = binder;
  return s;
}

State leaf_state() {
  State s;
  s.role = State::Role::Leaf;
  return s;
}

// A TyBase state for {ν : int | 10 >= ν >= 0}.
struct Fig3 {
  LTA a;
  int type = -1;
  RTypeP t = ty("{v : int | 10 >= v /\\ v >= 0}");
  Fig3() {
    int binder = a.add_state(leaf_state());
    int base = a.add_state(leaf_state());
    int qual = a.add_state(leaf_state());
    a.add_transition(Symbol::var_leaf(kNu), {}, c_true(), binder);
    a.add_transition(Symbol::base_leaf(BaseType::Int()), {}, c_true(), base);
    a.add_transition(Symbol::qual_leaf(t->qual), {}, c_true(), qual);
    type = a.add_state(type_state_of(kNu));
    a.add_transition(Symbol::of(K::TyBase), {binder, base, qual}, c_true(), type);
    a.finals.insert(type);
  }
};

}  // namespace

TEST_CASE("positions render and parse") {
  Position p = parse_position(K::App, "arg.type.ref");
  CHECK(p.size() == 3);
  CHECK(render_position(p) == "3.1.3");
  CHECK(parse_position(K::App, "").empty());
  CHECK_THROWS(parse_position(K::App, "nope"));
}

TEST_CASE("term_satisfies: entailment between siblings") {
  Oracle o;
  SymTreeP strong = type_tree(ty("{v : int | v > 5}"), "a");
  SymTreeP weak = type_tree(ty("{v : int | v > 0}"), "b");
  ConstraintP ent = c_sem({1, 3}, {2, 3});
  CHECK(term_satisfies(pair(strong, weak), ent, {}, o));
  CHECK_FALSE(term_satisfies(pair(weak, strong), ent, {}, o));
  CHECK(term_satisfies(pair(weak, strong), c_true(), {}, o));
  CHECK_FALSE(term_satisfies(pair(weak, strong), c_false(), {}, o));
}

TEST_CASE("term_satisfies: syntactic equality and connectives") {
  Oracle o;
  SymTreeP i1 = type_tree(ty("{v : int | v > 5}"), "a");
  SymTreeP i2 = type_tree(ty("{v : int | v < 0}"), "b");
  SymTreeP b = type_tree(ty("{v : bool | true}"), "c");
  ConstraintP sameBase = c_syn({1, 2}, {2, 2});
  CHECK(term_satisfies(pair(i1, i2), sameBase, {}, o));
  CHECK_FALSE(term_satisfies(pair(i1, b), sameBase, {}, o));
  CHECK(term_satisfies(pair(i1, b), c_not(sameBase), {}, o));
  CHECK(term_satisfies(pair(i1, b), c_or({sameBase, c_true()}), {}, o));
  CHECK_FALSE(term_satisfies(pair(i1, b), c_and({sameBase, c_true()}), {}, o));
}

TEST_CASE("subtype constraint between base types") {
  Oracle o;
  RTypeP nat = ty("{v : int | v >= 0}");
  RTypeP any = ty("int");
  RTypeP flag = ty("bool");
  auto sub = [&](const RTypeP& a, const RTypeP& b) {
    return term_satisfies(pair(type_tree(a, "x"), type_tree(b, "y")),
                          subtype_constraint(a, {1}, b, {2}), {}, o);
  };
  CHECK(sub(nat, any));
  CHECK_FALSE(sub(any, nat));
  CHECK(sub(nat, nat));
  CHECK_FALSE(sub(any, flag));
}

TEST_CASE("subtype constraint between arrows is contravariant") {
  Oracle o;
  RTypeP f = ty("(x : {v : int | v >= 0}) -> {v : int | v > x}");
  RTypeP g = ty("(x : {v : int | v >= 1}) -> {v : int | v >= x}");
  auto sub = [&](const RTypeP& a, const RTypeP& b) {
    return term_satisfies(pair(type_tree(a, "f"), type_tree(b, "g")),
                          subtype_constraint(a, {1}, b, {2}), {}, o);
  };
  CHECK(sub(f, g));
  CHECK_FALSE(sub(g, f));
  CHECK(sub(f, f));
}

TEST_CASE("denote: single type term") {
  Fig3 fig;
  Oracle o;
  TransitionChecker tc(fig.a, {}, o);
  auto trees = denote(fig.a, fig.type, DenoteBudget{}, tc);
  REQUIRE(trees.size() == 1);
  CHECK(type_equal(tree_type(trees[0]), fig.t));
  CHECK(nempty(fig.a, 0, tc).count(fig.type) == 1);
}

TEST_CASE("denote and nempty on degenerate automata") {
  LTA a;
  int q = a.add_state(leaf_state());
  a.add_transition(Symbol::of(K::Bottom), {}, c_true(), q);
  Oracle o;
  TransitionChecker tc(a, {}, o);
  CHECK(denote(a, q, DenoteBudget{}, tc).empty());
  CHECK(nempty(a, 3, tc).empty());
}

TEST_CASE("normalize removes transitions above an empty state") {
  Fig3 fig;
  LTA& a = fig.a;
  int dead = a.add_state(type_state_of("d"));
  a.add_transition(Symbol::of(K::Bottom), {}, c_true(), dead);
  int top = a.add_state(type_state_of("g"));
  int viaDead = a.add_transition(Symbol::of(K::TyArrow), {dead, fig.type}, c_true(), top);
  int viaLive = a.add_transition(Symbol::of(K::TyArrow), {fig.type, fig.type}, c_true(), top);
  a.finals.insert(top);
  normalize(a);
  CHECK_FALSE(a.transition(viaDead).alive);
  CHECK(a.transition(viaLive).alive);
  CHECK(a.users(dead).empty());

  std::string once = dump_text(a);
  int states = a.alive_states(), transitions = a.alive_transitions();
  normalize(a);
  CHECK(dump_text(a) == once);
  CHECK(a.alive_states() == states);
  CHECK(a.alive_transitions() == transitions);
}

TEST_CASE("dependency graph and cycle restriction") {
  Fig3 fig;
  LTA& a = fig.a;
  CHECK(dependency_graph(a).cyclic.empty());

  int loop = a.add_state(type_state_of("l"));
  a.add_transition(Symbol::of(K::TyArrow), {fig.type, fig.type}, c_true(), loop);
  int back = a.add_transition(Symbol::of(K::TyArrow), {fig.type, loop}, c_syn({2, 1}, {1, 1}), loop);
  int plain = a.add_transition(Symbol::of(K::TyArrow), {fig.type, loop}, c_true(), loop);
  DepGraph g = dependency_graph(a);
  CHECK(g.cyclic.count(loop) == 1);
  CHECK(g.cyclic.count(fig.type) == 0);
  CHECK_FALSE(constraint_well_formed(a, back, g));
  CHECK(constraint_well_formed(a, plain, g));
}

TEST_CASE("at_position follows children") {
  Fig3 fig;
  CHECK(at_position(fig.a, fig.type, {}) == std::set<int>{fig.type});
  CHECK(at_position(fig.a, fig.type, {3}).size() == 1);
}

TEST_CASE("dump formats") {
  Fig3 fig;
  std::string dot = dump_dot(fig.a);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK_FALSE(dump_text(fig.a).empty());
}
