#include "hegel/reduce.hpp"

#include <algorithm>

namespace hegel {

using K = Symbol::Kind;

// ---------------------------------------------------------------- intersections

namespace {

struct Product {
  LTA& a;
  std::map<std::pair<int, int>, int> states;

  int state(int q1, int q2) {
    if (q1 == q2) return q1;
    auto key = std::make_pair(q1, q2);
    if (auto it = states.find(key); it != states.end()) return it->second;
    State s = a.state(q1);
    s.key = s.key + "&" + a.state(q2).key;
    int q = a.add_state(s);
    states[key] = q;  // assumed inhabited on re-entry
    auto in1 = a.incoming(q1), in2 = a.incoming(q2);
    for (int d1 : in1)
      for (int d2 : in2) transition(d1, d2, q);
    return q;
  }

  int transition(int d1, int d2, int target) {
    if (d1 == d2) return d1;
    const Transition& t1 = a.transition(d1);
    const Transition& t2 = a.transition(d2);
    if (!symbol_equal(t1.sym, t2.sym) || t1.children.size() != t2.children.size()) return kBottom;
    std::vector<int> kids;
    Symbol sym = t1.sym;
    ConstraintP psi = t1.psi;
    InstP inst = t1.inst;
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < t1.children.size(); ++i)
      pairs.emplace_back(t1.children[i], t2.children[i]);
    for (auto& [c1, c2] : pairs) {
      int c = state(c1, c2);
      if (a.incoming(c).empty() && !states.count({c1, c2})) return kBottom;
      kids.push_back(c);
    }
    for (int c : kids)
      if (a.incoming(c).empty()) return kBottom;
    return a.add_transition(sym, kids, psi, target, inst);
  }
};

}  // namespace

int syntactic_intersection(LTA& a, int d1, int d2) {
  Product p{a, {}};
  return p.transition(d1, d2, a.transition(d1).target);
}

int semantic_intersection(const LTA& a, int di, int dj, const NameSubst& theta,
                          const BaseType& sort, const Context& env, Oracle& oracle) {
  const Transition& ti = a.transition(di);
  const Transition& tj = a.transition(dj);
  if (ti.sym.kind != K::QualLeaf || tj.sym.kind != K::QualLeaf)
    throw std::invalid_argument("semantic intersection needs qualifier transitions");
  EntailmentQuery q;
  q.subst = theta;
  q.antecedent = ti.sym.qual;
  q.consequent = tj.sym.qual;
  q.valueSort = sort;
  q.valueVar = kNu;
  q.context = env;
  q.context = slice_context(q);
  return oracle.check(q).is_invalid() ? kBottom : di;
}

// ---------------------------------------------------------------- prune

void prune(LTA& a, TransitionChecker& tc, ReductionStats& stats) {
  for (int sweep = 0; sweep < 10; ++sweep) {
    bool changed = false;
    int n = a.transition_count();
    for (int id = 0; id < n; ++id) {
      const Transition& t = a.transition(id);
      if (!t.alive || t.sym.kind == K::Bottom || t.psi->kind == Constraint::Kind::True) continue;
      if (tc.per_term(id) || tc.check(id) != Tri::False) continue;
      int target = t.target;
      a.remove_transition(id);
      a.add_transition(Symbol::of(K::Bottom), {}, c_false(), target);
      ++stats.transitionsPruned;
      changed = true;
    }
    normalize(a);
    if (!changed) break;
  }
}

// ---------------------------------------------------------------- similarity

namespace {

bool candidate(const LTA& a, int q) {
  const State& s = a.state(q);
  return s.alive && s.role == State::Role::Term && s.type->kind == RType::Kind::Base &&
         s.key.rfind("pending|", 0) != 0 && !a.incoming(q).empty();
}

}  // namespace

void similarity(ConstructionState& cs, SimilaritySet& e, TransitionChecker& tc,
                const SimilarityBudget& budget, ReductionStats& stats) {
  LTA& a = cs.lta;
  std::set<int> removed;
  for (auto& [ri, rj] : e.pairs) removed.insert(a.transition(rj).target);
  std::map<int, bool> live;
  auto is_live = [&](int q) {
    auto it = live.find(q);
    if (it != live.end()) return it->second;
    return live[q] = inhabited(a, q, a.depth, tc);
  };
  auto subtype = [&](int i, int j) {
    auto node = std::make_shared<SymTree>();
    node->sym = Symbol::of(K::Pair);
    node->kids = {tc.stub(i), tc.stub(j)};
    auto psi = subtype_constraint(a.state(i).type, {1, 1}, a.state(j).type, {2, 1});
    tc.evaluator().set_strengthen_only(true);
    Tri t = tc.evaluator().eval(node, psi);
    tc.evaluator().set_strengthen_only(false);
    return t == Tri::True;
  };
  auto rep = [&](int q) { return a.incoming(q).front(); };

  std::map<std::pair<K, std::string>, std::vector<int>> buckets;
  for (int q = 0; q < a.state_count(); ++q)
    if (candidate(a, q)) buckets[{a.state(q).termKind, erased_key(a.state(q).type)}].push_back(q);

  long checks = 0;
  for (auto& [key, qs] : buckets) {
    for (size_t x = 0; x < qs.size(); ++x)
      for (size_t y = x + 1; y < qs.size(); ++y) {
        int lo = qs[x], hi = qs[y];
        if (hi < cs.scanned) continue;
        if (removed.count(lo) || removed.count(hi)) continue;
        if (checks >= budget.maxPairs) goto done;
        const State& L = a.state(lo);
        const State& H = a.state(hi);
        if (L.size <= H.size && name_insensitive(cs, hi) && is_live(lo)) {
          ++checks;
          if (subtype(lo, hi)) {
            if (e.add(rep(lo), rep(hi))) ++stats.pairsRecorded;
            removed.insert(hi);
            continue;
          }
        }
        if (H.size <= L.size && name_insensitive(cs, lo) && is_live(hi)) {
          ++checks;
          if (subtype(hi, lo)) {
            if (e.add(rep(hi), rep(lo))) ++stats.pairsRecorded;
            removed.insert(lo);
          }
        }
      }
  }
done:
  cs.scanned = a.state_count();
}

// ---------------------------------------------------------------- minimize

namespace {

bool duplicate(const Transition& x, const Transition& y) {
  return symbol_equal(x.sym, y.sym) && x.children == y.children && x.target == y.target;
}

}  // namespace

void minimize(LTA& a, SimilaritySet& e, ReductionStats& stats) {
  std::map<int, int> mergedInto;
  auto find = [&](int q) {
    while (mergedInto.count(q)) q = mergedInto[q];
    return q;
  };
  for (auto& [ti, tj] : e.pairs) {
    int i = find(a.transition(ti).target), j = find(a.transition(tj).target);
    if (i == j || !a.state(i).alive || !a.state(j).alive) {
      ++stats.stalePairs;
      continue;
    }
    for (int u : a.users(j)) {
      Transition t = a.transition(u);
      Transition moved = t;
      for (auto& c : moved.children)
        if (c == j) c = i;
      a.remove_transition(u);
      bool dup = false;
      for (int other : a.users(i))
        if (duplicate(a.transition(other), moved)) dup = true;
      if (!dup) a.add_transition(moved.sym, moved.children, moved.psi, moved.target, moved.inst);
    }
    stats.transitionsMerged += static_cast<long>(a.incoming(j).size());
    a.remove_state(j);
    mergedInto[j] = i;
  }
  e.pairs.clear();
  e.seen.clear();
  normalize(a);
}

}  // namespace hegel
