#include "hegel/automaton.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

namespace hegel {

using K = Symbol::Kind;

// ---------------------------------------------------------------- symbols

int arity(const Symbol& s) {
  switch (s.kind) {
    case K::Var: case K::Const: return 1;
    case K::App: return 3;
    case K::If: return 4;
    case K::Goal: case K::TyArrow: case K::Pair: return 2;
    case K::TyBase: return 3;
    default: return 0;
  }
}

bool is_term_symbol(K k) {
  return k == K::Var || k == K::Const || k == K::App || k == K::If || k == K::Goal;
}

bool symbol_equal(const Symbol& a, const Symbol& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case K::Var: case K::VarLeaf: return a.name == b.name;
    case K::Const: return a.lit == b.lit;
    case K::BaseLeaf: return a.base == b.base;
    case K::QualLeaf: return qual_equal(a.qual, b.qual);
    default: return true;
  }
}

std::string to_string(const Symbol& s) {
  switch (s.kind) {
    case K::Var: return "var " + s.name;
    case K::Const: return "const " + to_string(s.lit);
    case K::App: return "app";
    case K::If: return "if";
    case K::Goal: return "goal";
    case K::TyBase: return "τ-base";
    case K::TyArrow: return "arrow";
    case K::VarLeaf: return "binder " + s.name;
    case K::BaseLeaf: return to_string(s.base);
    case K::QualLeaf: return pretty(s.qual);
    case K::Pair: return "pair";
    case K::Bottom: return "⊥";
  }
  return "?";
}

// ---------------------------------------------------------------- positions

namespace {

const std::map<K, std::vector<std::string>>& label_table() {
  static const std::map<K, std::vector<std::string>> t = {
      {K::App, {"type", "fun", "arg"}},
      {K::If, {"type", "cond", "then", "else"}},
      {K::Goal, {"type", "term"}},
      {K::TyBase, {"var", "base", "ref"}},
      {K::TyArrow, {"in", "out"}},
      {K::Var, {"type"}},
      {K::Const, {"type"}},
      {K::Pair, {"left", "right"}},
  };
  return t;
}

}  // namespace

int label_index(K k, const std::string& label) {
  auto it = label_table().find(k);
  if (it == label_table().end()) return 0;
  for (size_t i = 0; i < it->second.size(); ++i)
    if (it->second[i] == label) return static_cast<int>(i) + 1;
  return 0;
}

std::string label_name(K k, int index) {
  auto it = label_table().find(k);
  if (it == label_table().end() || index < 1 || index > static_cast<int>(it->second.size()))
    return std::to_string(index);
  return it->second[static_cast<size_t>(index) - 1];
}

Position parse_position(K root, const std::string& text) {
  Position p;
  if (text.empty() || text == "ε") return p;
  // Below the root the kind is only known by level: term nodes expose `type`,
  // type nodes expose the τ-base and arrow labels.
  enum class Level { Root, Term, Type } level = Level::Root;
  std::stringstream ss(text);
  std::string step;
  while (std::getline(ss, step, '.')) {
    int idx = 0;
    if (!step.empty() && std::all_of(step.begin(), step.end(), ::isdigit)) {
      idx = std::stoi(step);
    } else if (level == Level::Root) {
      idx = label_index(root, step);
    } else if (level == Level::Term) {
      idx = step == "type" ? 1 : 0;
    } else {
      idx = label_index(K::TyBase, step);
      if (!idx) idx = label_index(K::TyArrow, step);
    }
    if (idx < 1) throw std::invalid_argument("unknown position label: " + step);
    bool intoType = step == "type" || level == Level::Type || (level == Level::Root &&
                    (root == K::TyBase || root == K::TyArrow));
    level = intoType ? Level::Type : Level::Term;
    p.push_back(idx);
  }
  return p;
}

std::string render_position(const Position& p) {
  if (p.empty()) return "ε";
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) s += (i ? "." : "") + std::to_string(p[i]);
  return s;
}

// ---------------------------------------------------------------- constraints

namespace {

ConstraintP mk(Constraint c) { return std::make_shared<const Constraint>(std::move(c)); }

}  // namespace

ConstraintP c_true() {
  static const ConstraintP t = mk({});
  return t;
}

ConstraintP c_false() {
  static const ConstraintP f = mk({Constraint::Kind::False, {}, {}, {}, true, {}});
  return f;
}

ConstraintP c_syn(Position a, Position b) {
  return mk({Constraint::Kind::SynEq, std::move(a), std::move(b), {}, true, {}});
}

ConstraintP c_sem(Position a, Position b) {
  return mk({Constraint::Kind::SemEnt, std::move(a), std::move(b), {}, true, {}});
}

ConstraintP c_not(ConstraintP c) {
  return mk({Constraint::Kind::Not, {}, {}, {}, true, {std::move(c)}});
}

ConstraintP c_and(std::vector<ConstraintP> cs) {
  std::vector<ConstraintP> out;
  for (auto& c : cs) {
    if (c->kind == Constraint::Kind::True) continue;
    if (c->kind == Constraint::Kind::False) return c_false();
    if (c->kind == Constraint::Kind::And)
      out.insert(out.end(), c->kids.begin(), c->kids.end());
    else
      out.push_back(c);
  }
  if (out.empty()) return c_true();
  if (out.size() == 1) return out[0];
  return mk({Constraint::Kind::And, {}, {}, {}, true, std::move(out)});
}

ConstraintP c_or(std::vector<ConstraintP> cs) {
  std::vector<ConstraintP> out;
  for (auto& c : cs) {
    if (c->kind == Constraint::Kind::False) continue;
    if (c->kind == Constraint::Kind::True) return c_true();
    out.push_back(c);
  }
  if (out.empty()) return c_false();
  if (out.size() == 1) return out[0];
  return mk({Constraint::Kind::Or, {}, {}, {}, true, std::move(out)});
}

ConstraintP c_subst(PosSubst s, ConstraintP body) {
  if (body->kind == Constraint::Kind::True || s.pairs.empty()) return body;
  return mk({Constraint::Kind::Subst, {}, {}, std::move(s), true, {std::move(body)}});
}

ConstraintP c_assume(Position cond, bool polarity, ConstraintP body) {
  if (body->kind == Constraint::Kind::True) return body;
  return mk({Constraint::Kind::Assume, std::move(cond), {}, {}, polarity, {std::move(body)}});
}

std::string render_constraint(const ConstraintP& c) {
  using CK = Constraint::Kind;
  switch (c->kind) {
    case CK::True: return "True";
    case CK::False: return "False";
    case CK::SynEq: return render_position(c->p1) + " = " + render_position(c->p2);
    case CK::SemEnt: return render_position(c->p1) + " ⊨ " + render_position(c->p2);
    case CK::Not: return "¬(" + render_constraint(c->kids[0]) + ")";
    case CK::And:
    case CK::Or: {
      std::string s = "(";
      for (size_t i = 0; i < c->kids.size(); ++i)
        s += (i ? (c->kind == CK::And ? " ∧ " : " ∨ ") : "") + render_constraint(c->kids[i]);
      return s + ")";
    }
    case CK::Subst: {
      std::string s = "[";
      for (size_t i = 0; i < c->sub.pairs.size(); ++i)
        s += (i ? ", " : "") + render_position(c->sub.pairs[i].first) + "/" +
             render_position(c->sub.pairs[i].second);
      return s + "]." + render_constraint(c->kids[0]);
    }
    case CK::Assume:
      return std::string("assume(") + render_position(c->p1) + (c->polarity ? ",+)." : ",-).") +
             render_constraint(c->kids[0]);
  }
  return "?";
}

void constraint_positions(const ConstraintP& c, std::vector<Position>& out) {
  using CK = Constraint::Kind;
  if (c->kind == CK::SynEq || c->kind == CK::SemEnt) {
    out.push_back(c->p1);
    out.push_back(c->p2);
  }
  if (c->kind == CK::Assume) out.push_back(c->p1);
  for (auto& [r, t] : c->sub.pairs) {
    out.push_back(r);
    out.push_back(t);
  }
  for (auto& k : c->kids) constraint_positions(k, out);
}

// ---------------------------------------------------------------- automaton

int LTA::add_state(State s) {
  s.id = static_cast<int>(states_.size());
  states_.push_back(std::move(s));
  byTarget_.emplace_back();
  byChild_.emplace_back();
  return states_.back().id;
}

int LTA::add_transition(Symbol sym, std::vector<int> children, ConstraintP psi, int target,
                        InstP inst) {
  if (static_cast<int>(children.size()) != arity(sym))
    throw std::invalid_argument("arity mismatch for " + to_string(sym));
  Transition t;
  t.id = static_cast<int>(transitions_.size());
  t.sym = std::move(sym);
  t.children = std::move(children);
  t.psi = psi ? std::move(psi) : c_true();
  if (t.sym.kind == K::Bottom) t.psi = c_false();
  t.target = target;
  t.inst = std::move(inst);
  byTarget_[static_cast<size_t>(target)].push_back(t.id);
  for (int c : t.children) {
    auto& v = byChild_[static_cast<size_t>(c)];
    if (v.empty() || v.back() != t.id) v.push_back(t.id);
  }
  bySymbol_[t.sym.kind].push_back(t.id);
  transitions_.push_back(std::move(t));
  return transitions_.back().id;
}

void LTA::remove_transition(int id) { transitions_[static_cast<size_t>(id)].alive = false; }

void LTA::remove_state(int id) {
  states_[static_cast<size_t>(id)].alive = false;
  for (int t : byTarget_[static_cast<size_t>(id)]) remove_transition(t);
  finals.erase(id);
}

int LTA::alive_states() const {
  return static_cast<int>(std::count_if(states_.begin(), states_.end(),
                                        [](const State& s) { return s.alive; }));
}

int LTA::alive_transitions() const {
  return static_cast<int>(std::count_if(transitions_.begin(), transitions_.end(),
                                        [](const Transition& t) { return t.alive; }));
}

std::vector<int> LTA::incoming(int q) const {
  std::vector<int> out;
  for (int t : byTarget_[static_cast<size_t>(q)])
    if (transitions_[static_cast<size_t>(t)].alive) out.push_back(t);
  return out;
}

std::vector<int> LTA::users(int q) const {
  std::vector<int> out;
  for (int t : byChild_[static_cast<size_t>(q)])
    if (transitions_[static_cast<size_t>(t)].alive) out.push_back(t);
  return out;
}

std::vector<int> LTA::by_symbol(K k) const {
  std::vector<int> out;
  auto it = bySymbol_.find(k);
  if (it == bySymbol_.end()) return out;
  for (int t : it->second)
    if (transitions_[static_cast<size_t>(t)].alive) out.push_back(t);
  return out;
}

std::set<int> at_position_from_transition(const LTA& a, int transition, const Position& p) {
  if (p.empty()) return {transition};
  const Transition& t = a.transition(transition);
  if (p[0] < 1 || p[0] > static_cast<int>(t.children.size())) return {};
  return at_position(a, t.children[static_cast<size_t>(p[0]) - 1],
                     Position(p.begin() + 1, p.end()));
}

std::set<int> at_position(const LTA& a, int state, const Position& p) {
  std::set<int> out;
  for (int t : a.incoming(state)) {
    auto s = p.empty() ? std::set<int>{t} : at_position_from_transition(a, t, p);
    out.insert(s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------- trees

SymTreeP type_tree(const RTypeP& t, const std::string& binder) {
  auto node = std::make_shared<SymTree>();
  switch (t->kind) {
    case RType::Kind::Base: {
      node->sym = Symbol::of(K::TyBase);
      auto leaf = [](Symbol s) {
        auto n = std::make_shared<SymTree>();
        n->sym = std::move(s);
        return SymTreeP(n);
      };
      node->kids = {leaf(Symbol::var_leaf(binder)), leaf(Symbol::base_leaf(t->base)),
                    leaf(Symbol::qual_leaf(base_qual_as(t, kNu)))};
      break;
    }
    case RType::Kind::Arrow:
      node->sym = Symbol::of(K::TyArrow);
      node->kids = {type_tree(t->argType, t->argName), type_tree(t->resType, kNu)};
      break;
    default:
      return type_tree(t->body, binder);
  }
  return node;
}

RTypeP tree_type(const SymTreeP& t) {
  if (t->sym.kind == K::TyBase)
    return t_base(kNu, t->kids[1]->sym.base, t->kids[2]->sym.qual);
  if (t->sym.kind == K::TyArrow) {
    auto& in = t->kids[0];
    std::string x = in->sym.kind == K::TyBase ? in->kids[0]->sym.name : "_";
    return t_arrow(x, tree_type(in), tree_type(t->kids[1]));
  }
  throw PositionUnresolved("not a type tree: " + to_string(t->sym));
}

Resolved resolve(const SymTreeP& root, const Position& p) {
  Resolved r{root, {}};
  for (int j : p) {
    auto& n = r.node;
    if (j < 1 || j > static_cast<int>(n->kids.size()))
      throw PositionUnresolved("position " + render_position(p) + " leaves the tree at " +
                               to_string(n->sym));
    if (n->inst && static_cast<size_t>(j) <= n->inst->size())
      r.inst = (*n->inst)[static_cast<size_t>(j) - 1];
    r.node = n->kids[static_cast<size_t>(j) - 1];
  }
  return r;
}

QualP position_name(const Resolved& r) {
  auto& n = r.node;
  switch (n->sym.kind) {
    case K::VarLeaf: return q_var(n->sym.name);
    case K::TyBase: return q_var(n->kids[0]->sym.name);
    case K::Var: return q_var(n->sym.name);
    case K::Const: return literal_qual(n->sym.lit);
    case K::App: case K::If:
      if (!n->binder.empty()) return q_var(n->binder);
      break;
    default: break;
  }
  throw PositionUnresolved("no name for " + to_string(n->sym));
}

BaseType resolved_base(const Resolved& r) {
  const SymTree* n = r.node.get();
  if (n->sym.kind == K::TyBase) n = n->kids[1].get();
  if (n->sym.kind != K::BaseLeaf) throw PositionUnresolved("no base type at " + to_string(n->sym));
  return r.inst.empty() ? n->sym.base : subst_tyvars(n->sym.base, r.inst);
}

QualP resolved_qual(const Resolved& r) {
  const SymTree* n = r.node.get();
  if (n->sym.kind == K::TyBase) n = n->kids[2].get();
  if (n->sym.kind != K::QualLeaf) throw PositionUnresolved("no qualifier at " + to_string(n->sym));
  return r.inst.empty() ? n->sym.qual : qual_subst_tyvars(n->sym.qual, r.inst);
}

namespace {

bool tree_equal(const SymTreeP& a, const TyInst& ia, const SymTreeP& b, const TyInst& ib) {
  Symbol sa = a->sym, sb = b->sym;
  if (sa.kind == K::BaseLeaf) sa.base = subst_tyvars(sa.base, ia);
  if (sb.kind == K::BaseLeaf) sb.base = subst_tyvars(sb.base, ib);
  if (sa.kind == K::QualLeaf) sa.qual = qual_subst_tyvars(sa.qual, ia);
  if (sb.kind == K::QualLeaf) sb.qual = qual_subst_tyvars(sb.qual, ib);
  if (!symbol_equal(sa, sb) || a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!tree_equal(a->kids[i], ia, b->kids[i], ib)) return false;
  return true;
}

Position parent(const Position& p) { return Position(p.begin(), p.end() - (p.empty() ? 0 : 1)); }

Tri tri_of(const OracleVerdict& v) {
  return v.is_valid() ? Tri::True : v.is_invalid() ? Tri::False : Tri::Unknown;
}

}  // namespace

// ---------------------------------------------------------------- evaluation

const RTypeP* Evaluator::lookup(const std::string& name, const Frame& f) {
  for (auto it = f.extra.rbegin(); it != f.extra.rend(); ++it)
    if (it->first == name) return &it->second;
  if (indexed_ != env_.size()) {
    for (size_t i = indexed_; i < env_.size(); ++i) index_[env_[i].first] = i;
    indexed_ = env_.size();
  }
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &env_[it->second].second;
}

namespace {

bool has_exists(const QualP& q) {
  if (q->kind == Qual::Kind::Exists) return true;
  for (auto& k : q->kids)
    if (has_exists(k)) return true;
  return false;
}

// Top-level existentials of an antecedent become fresh free witnesses.
QualP open_exists(const QualP& q, std::vector<std::pair<std::string, BaseType>>& ws) {
  if (q->kind == Qual::Kind::Exists) {
    std::string w = "w#" + std::to_string(ws.size() + 1);
    ws.emplace_back(w, q->sort);
    return open_exists(qual_subst(q->kids[0], {{q->name, q_var(w)}}), ws);
  }
  if (q->kind == Qual::Kind::And) {
    std::vector<QualP> kids;
    for (auto& k : q->kids) kids.push_back(open_exists(k, ws));
    return q_and(std::move(kids));
  }
  return q;
}

// Positive existentials become disjunctions over same-sort witnesses, a
// sound strengthening; `closed` drops to false if some existential remains.
QualP instantiate_exists(const QualP& q, const std::vector<std::pair<std::string, BaseType>>& ws,
                         bool& closed) {
  switch (q->kind) {
    case Qual::Kind::Exists: {
      std::vector<QualP> alts;
      for (auto& [w, s] : ws)
        if (s == q->sort)
          alts.push_back(instantiate_exists(qual_subst(q->kids[0], {{q->name, q_var(w)}}), ws, closed));
      if (alts.empty()) {
        closed = false;
        return q;
      }
      return q_or(std::move(alts));
    }
    case Qual::Kind::And:
    case Qual::Kind::Or: {
      std::vector<QualP> kids;
      for (auto& k : q->kids) kids.push_back(instantiate_exists(k, ws, closed));
      return q->kind == Qual::Kind::And ? q_and(std::move(kids)) : q_or(std::move(kids));
    }
    default:
      if (has_exists(q)) closed = false;
      return q;
  }
}

}  // namespace

Tri Evaluator::entail(const QualP& lhs, const QualP& rhs, const BaseType& sort, const Frame& f) {
  QualP l = lhs, r = rhs;
  for (auto it = f.substs.rbegin(); it != f.substs.rend(); ++it) {
    l = qual_subst(l, *it);
    r = qual_subst(r, *it);
  }
  // Cone of influence over the environment, in name order for determinism.
  std::map<std::string, RTypeP> keep;
  std::vector<std::string> work;
  auto want = [&](const QualP& q) {
    for (auto& x : free_vars(q)) work.push_back(x);
  };
  want(l);
  want(r);
  for (auto& p : f.props) want(p);
  while (!work.empty()) {
    std::string x = work.back();
    work.pop_back();
    if (x == kNu || keep.count(x)) continue;
    const RTypeP* t = lookup(x, f);
    if (!t) continue;
    keep.emplace(x, *t);
    if ((*t)->kind == RType::Kind::Base) want(base_qual_as(*t, x));
  }
  Context ctx(keep.begin(), keep.end());
  if (!has_exists(r)) return tri_of(entails(oracle_, ctx, f.props, l, r, sort, kNu));

  std::vector<std::pair<std::string, BaseType>> witnesses;
  QualP lo = open_exists(l, witnesses);
  bool closed = true;
  QualP rs = instantiate_exists(r, witnesses, closed);
  if (closed) {
    Context wctx = ctx;
    for (auto& [w, s] : witnesses) wctx.emplace_back(w, t_base(w, s, q_true()));
    if (entails(oracle_, wctx, f.props, lo, rs, sort, kNu).is_valid()) return Tri::True;
  }
  if (strengthenOnly_) return Tri::Unknown;
  return tri_of(entails(oracle_, ctx, f.props, l, r, sort, kNu));
}

namespace {

// A polymorphic variable used at an instance: its environment binding has the
// generic sort, so the instance is named separately.
std::optional<std::pair<std::string, RTypeP>> generic_instance(const Resolved& r) {
  const SymTree& n = *r.node;
  if (n.sym.kind != K::Var || r.inst.empty() || n.kids.empty()) return std::nullopt;
  const SymTree& ty = *n.kids[0];
  if (ty.sym.kind != K::TyBase) return std::nullopt;
  const BaseType& base = ty.kids[1]->sym.base;
  BaseType inst = subst_tyvars(base, r.inst);
  if (inst == base) return std::nullopt;
  std::map<std::string, BaseType> m(r.inst.begin(), r.inst.end());
  QualP q = qual_subst_tyvars(ty.kids[2]->sym.qual, m);
  return std::make_pair(n.sym.name + "@" + to_string(inst), t_base(kNu, inst, q));
}

}  // namespace

Tri Evaluator::eval(const SymTreeP& root, const ConstraintP& c) {
  Frame f;
  return eval_in(root, c, f);
}

Tri Evaluator::eval_in(const SymTreeP& root, const ConstraintP& c, Frame& f) {
  using CK = Constraint::Kind;
  switch (c->kind) {
    case CK::True: return Tri::True;
    case CK::False: return Tri::False;
    case CK::SynEq: {
      auto a = resolve(root, c->p1), b = resolve(root, c->p2);
      return tree_equal(a.node, a.inst, b.node, b.inst) ? Tri::True : Tri::False;
    }
    case CK::SemEnt: {
      auto a = resolve(root, c->p1), b = resolve(root, c->p2);
      Resolved owner = a.node->sym.kind == K::TyBase ? a : resolve(root, parent(c->p1));
      return entail(resolved_qual(a), resolved_qual(b), resolved_base(owner), f);
    }
    case CK::Not: {
      Tri t = eval_in(root, c->kids[0], f);
      return t == Tri::Unknown ? t : t == Tri::True ? Tri::False : Tri::True;
    }
    case CK::And:
    case CK::Or: {
      Tri stop = c->kind == CK::And ? Tri::False : Tri::True;
      Tri out = c->kind == CK::And ? Tri::True : Tri::False;
      for (auto& k : c->kids) {
        Tri t = eval_in(root, k, f);
        if (t == stop) return stop;
        if (t == Tri::Unknown) out = Tri::Unknown;
      }
      return out;
    }
    case CK::Subst: {
      NameSubst sub;
      size_t extraBefore = f.extra.size();
      for (auto& [rp, tp] : c->sub.pairs) {
        auto rr = resolve(root, rp), rt = resolve(root, tp);
        QualP target = position_name(rt);
        QualP repl = position_name(rr);
        if (rr.node->sym.kind == K::TyBase && repl->kind == Qual::Kind::Var)
          f.extra.emplace_back(repl->name,
                               t_base(kNu, resolved_base(rr), resolved_qual(rr)));
        if (auto inst = generic_instance(rr)) {
          repl = q_var(inst->first);
          f.extra.push_back(*inst);
        }
        if (target->kind == Qual::Kind::Var && !qual_equal(target, repl))
          sub[target->name] = repl;
      }
      f.substs.push_back(std::move(sub));
      Tri t = eval_in(root, c->kids[0], f);
      f.substs.pop_back();
      f.extra.resize(extraBefore);
      return t;
    }
    case CK::Assume: {
      auto rc = resolve(root, c->p1);
      QualP name = position_name(rc);
      Position refPos = c->p1;
      refPos.insert(refPos.end(), {1, 3});
      QualP ref = qual_subst(resolved_qual(resolve(root, refPos)), {{kNu, name}});
      f.props.push_back(q_and2(ref, c->polarity ? name : q_not(name)));
      Tri t = eval_in(root, c->kids[0], f);
      f.props.pop_back();
      return t;
    }
  }
  return Tri::Unknown;
}

bool term_satisfies(const SymTreeP& t, const ConstraintP& c, const Context& env, Oracle& oracle) {
  Evaluator e(env, oracle);
  return e.eval(t, c) == Tri::True;
}

// ---------------------------------------------------------------- transition checks

SymTreeP TransitionChecker::state_tree(int q) {
  if (auto it = typeTrees_.find(q); it != typeTrees_.end()) return it->second;
  auto in = a_.incoming(q);
  if (in.size() != 1) throw PositionUnresolved("state q" + std::to_string(q) + " is not unique");
  const Transition& t = a_.transition(in[0]);
  auto node = std::make_shared<SymTree>();
  node->sym = t.sym;
  node->state = q;
  node->transition = t.id;
  node->inst = t.inst;
  for (int c : t.children) node->kids.push_back(state_tree(c));
  typeTrees_[q] = node;
  return node;
}

SymTreeP TransitionChecker::stub(int q) {
  const State& s = a_.state(q);
  if (s.role != State::Role::Term) return state_tree(q);
  auto node = std::make_shared<SymTree>();
  node->sym = Symbol::var(s.name);
  if (s.termKind == K::Const) {
    for (int t : a_.incoming(q))
      if (a_.transition(t).sym.kind == K::Const) node->sym = a_.transition(t).sym;
  }
  node->state = q;
  node->binder = s.name;
  node->kids = {state_tree(s.typeState)};
  return node;
}

SymTreeP TransitionChecker::representative(int id) {
  const Transition& t = a_.transition(id);
  auto node = std::make_shared<SymTree>();
  node->sym = t.sym;
  node->transition = id;
  node->state = t.target;
  node->binder = a_.state(t.target).name;
  node->inst = t.inst;
  for (int c : t.children) node->kids.push_back(stub(c));
  return node;
}

Tri TransitionChecker::check(int id) {
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const Transition& t = a_.transition(id);
  Tri v;
  if (t.sym.kind == K::Bottom) {
    v = Tri::False;
  } else if (t.psi->kind == Constraint::Kind::True) {
    v = Tri::True;
  } else {
    try {
      v = eval_.eval(representative(id), t.psi);
    } catch (const PositionUnresolved&) {
      perTerm_.insert(id);
      v = Tri::Unknown;
    }
  }
  cache_[id] = v;
  return v;
}

bool TransitionChecker::per_term(int id) {
  check(id);
  return perTerm_.count(id) > 0;
}

// ---------------------------------------------------------------- sizes

namespace {

// Size of a node from its children's sizes.
int combine_size(K k, const std::vector<int>& kids) {
  if (k == K::App) return std::max(1, kids[1]) + kids[2] + kids[0];
  int s = 0;
  for (int x : kids) s += x;
  return s;
}

// Enumerates child size vectors with combined size exactly `s`.
void size_splits(K k, size_t n, int s, std::vector<int>& cur,
                 const std::function<void(const std::vector<int>&)>& emit) {
  if (cur.size() == n) {
    if (combine_size(k, cur) == s) emit(cur);
    return;
  }
  for (int x = 0; x <= s; ++x) {
    cur.push_back(x);
    std::vector<int> probe = cur;
    probe.resize(n, 0);
    if (combine_size(k, probe) <= s) size_splits(k, n, s, cur, emit);
    cur.pop_back();
  }
}

const std::vector<std::vector<int>>& splits(K k, size_t n, int s) {
  thread_local std::map<std::tuple<K, size_t, int>, std::vector<std::vector<int>>> memo;
  auto key = std::make_tuple(k, n, s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  size_splits(k, n, s, cur, [&](const std::vector<int>& v) { out.push_back(v); });
  return memo[key] = std::move(out);
}

}  // namespace

int tree_size(const SymTreeP& t) {
  std::vector<int> kids;
  for (auto& k : t->kids) kids.push_back(tree_size(k));
  return combine_size(t->sym.kind, kids);
}

// ---------------------------------------------------------------- denotation

namespace {

struct Denoter {
  const LTA& a;
  TransitionChecker& tc;
  DenoteBudget b;
  std::set<int> cyclic;
  std::map<std::tuple<int, int, int>, std::vector<SymTreeP>> memo;

  const std::vector<SymTreeP>& terms(int q, int s, int d) {
    auto key = std::make_tuple(q, s, d);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    memo[key];  // empty while in progress
    std::vector<SymTreeP> acc;
    for (int id : a.incoming(q)) {
      if (static_cast<int>(acc.size()) >= b.maxTerms) break;
      const Transition& t = a.transition(id);
      if (t.sym.kind == K::Bottom) continue;
      bool perTerm = tc.per_term(id);
      if (!perTerm && tc.check(id) != Tri::True) continue;
      for (auto& split : splits(t.sym.kind, t.children.size(), s)) {
        std::vector<const std::vector<SymTreeP>*> lists;
        bool empty = false;
        for (size_t i = 0; i < t.children.size() && !empty; ++i) {
          int c = t.children[i];
          int nd = cyclic.count(c) ? d - 1 : d;
          if (nd < 0) { empty = true; break; }
          lists.push_back(&terms(c, split[i], nd));
          if (lists.back()->empty()) empty = true;
        }
        if (empty) continue;
        std::vector<size_t> idx(lists.size(), 0);
        while (static_cast<int>(acc.size()) < b.maxTerms) {
          auto node = std::make_shared<SymTree>();
          node->sym = t.sym;
          node->state = q;
          node->transition = id;
          node->inst = t.inst;
          if (t.sym.kind == K::App || t.sym.kind == K::If) node->binder = a.state(q).name;
          for (size_t i = 0; i < lists.size(); ++i) node->kids.push_back((*lists[i])[idx[i]]);
          if (!perTerm || term_satisfies(node, t.psi, tc.evaluator().env(), tc.evaluator().oracle()))
            acc.push_back(node);
          size_t i = 0;
          for (; i < idx.size(); ++i) {
            if (++idx[i] < lists[i]->size()) break;
            idx[i] = 0;
          }
          if (i == idx.size()) break;
        }
      }
    }
    auto& slot = memo[key];
    slot = std::move(acc);
    return slot;
  }
};

}  // namespace

std::vector<SymTreeP> denote(const LTA& a, int root, const DenoteBudget& b, TransitionChecker& tc) {
  Denoter dn{a, tc, b, dependency_graph(a).cyclic, {}};
  std::vector<SymTreeP> out;
  for (int s = 0; s <= b.maxSize && static_cast<int>(out.size()) < b.maxTerms; ++s)
    for (auto& t : dn.terms(root, s, b.maxDepth)) {
      if (static_cast<int>(out.size()) >= b.maxTerms) break;
      out.push_back(t);
    }
  return out;
}

namespace {

std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) {
  return x > UINT64_MAX - y ? UINT64_MAX : x + y;
}

std::uint64_t sat_mul(std::uint64_t x, std::uint64_t y) {
  if (x == 0 || y == 0) return 0;
  return x > UINT64_MAX / y ? UINT64_MAX : x * y;
}

struct Counter {
  const LTA& a;
  TransitionChecker& tc;
  std::map<std::pair<int, int>, std::uint64_t> memo;
  std::set<std::pair<int, int>> active;

  std::uint64_t candidates(int id, int s) {
    const Transition& t = a.transition(id);
    if (t.sym.kind == K::Bottom) return 0;
    std::uint64_t total = 0;
    for (auto& split : splits(t.sym.kind, t.children.size(), s)) {
      std::uint64_t prod = 1;
      for (size_t i = 0; i < t.children.size() && prod; ++i)
        prod = sat_mul(prod, valid(t.children[i], split[i]));
      total = sat_add(total, prod);
    }
    return total;
  }

  std::uint64_t valid(int q, int s) {
    auto key = std::make_pair(q, s);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (active.count(key)) return 0;
    active.insert(key);
    std::uint64_t n = 0;
    for (int id : a.incoming(q))
      if (tc.check(id) == Tri::True) n = sat_add(n, candidates(id, s));
    active.erase(key);
    memo[key] = n;
    return n;
  }
};

}  // namespace

std::uint64_t count_candidates(const LTA& a, int root, int maxSize, TransitionChecker& tc) {
  Counter c{a, tc, {}, {}};
  // Term-level transitions reachable from the root.
  std::set<int> seen{root};
  std::vector<int> work{root};
  std::vector<int> trans;
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    for (int id : a.incoming(q)) {
      const Transition& t = a.transition(id);
      if (!is_term_symbol(t.sym.kind) || t.sym.kind == K::Goal) {
        if (t.sym.kind != K::Goal) continue;
      } else {
        trans.push_back(id);
      }
      for (int ch : t.children)
        if (a.state(ch).role == State::Role::Term && seen.insert(ch).second) work.push_back(ch);
    }
  }
  std::sort(trans.begin(), trans.end());
  trans.erase(std::unique(trans.begin(), trans.end()), trans.end());
  std::uint64_t total = 0;
  for (int id : trans)
    for (int s = 0; s <= maxSize; ++s) total = sat_add(total, c.candidates(id, s));
  return total;
}

bool inhabited(const LTA& a, int state, int maxSize, TransitionChecker& tc) {
  DenoteBudget b;
  b.maxSize = maxSize;
  b.maxTerms = 1;
  return !denote(a, state, b, tc).empty();
}

std::set<int> nempty(const LTA& a, int maxSize, TransitionChecker& tc) {
  std::set<int> out;
  for (int f : a.finals)
    if (inhabited(a, f, maxSize, tc)) out.insert(f);
  return out;
}

// ---------------------------------------------------------------- normalization

void normalize(LTA& a) {
  for (bool changed = true; changed;) {
    changed = false;
    for (int id = 0; id < a.transition_count(); ++id) {
      const Transition& t = a.transition(id);
      if (!t.alive) continue;
      bool drop = t.sym.kind == K::Bottom || !a.state(t.target).alive;
      for (int c : t.children)
        if (!a.state(c).alive || a.incoming(c).empty()) drop = true;
      if (drop) {
        a.remove_transition(id);
        changed = true;
      }
    }
    std::vector<char> reach(static_cast<size_t>(a.state_count()), 0);
    std::vector<int> work;
    for (int q = 0; q < a.state_count(); ++q) {
      const State& s = a.state(q);
      if (!s.alive) continue;
      bool root = a.finals.count(q) || a.pinned.count(q) ||
                  (s.role == State::Role::Term && !a.incoming(q).empty());
      if (root) {
        reach[static_cast<size_t>(q)] = 1;
        work.push_back(q);
      }
    }
    while (!work.empty()) {
      int q = work.back();
      work.pop_back();
      for (int id : a.incoming(q))
        for (int c : a.transition(id).children)
          if (!reach[static_cast<size_t>(c)]) {
            reach[static_cast<size_t>(c)] = 1;
            work.push_back(c);
          }
    }
    for (int q = 0; q < a.state_count(); ++q)
      if (a.state(q).alive && !reach[static_cast<size_t>(q)]) {
        a.remove_state(q);
        changed = true;
      }
  }
}

// ---------------------------------------------------------------- cycles

DepGraph dependency_graph(const LTA& a) {
  DepGraph g;
  for (int id = 0; id < a.transition_count(); ++id) {
    const Transition& t = a.transition(id);
    if (!t.alive) continue;
    for (int c : t.children) g.edges[c].insert(t.target);
  }
  // Tarjan's strongly connected components, iterative.
  std::map<int, int> index, low;
  std::set<int> onStack;
  std::vector<int> stack;
  int counter = 0;
  std::set<int> nodes;
  for (auto& [u, vs] : g.edges) {
    nodes.insert(u);
    nodes.insert(vs.begin(), vs.end());
  }
  static const std::set<int> none;
  auto succ = [&](int u) -> const std::set<int>& {
    auto it = g.edges.find(u);
    return it == g.edges.end() ? none : it->second;
  };
  for (int root : nodes) {
    if (index.count(root)) continue;
    std::vector<std::pair<int, std::set<int>::const_iterator>> call;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack.insert(root);
    call.emplace_back(root, succ(root).begin());
    while (!call.empty()) {
      auto& [u, it] = call.back();
      if (it != succ(u).end()) {
        int v = *it++;
        if (!index.count(v)) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          onStack.insert(v);
          call.emplace_back(v, succ(v).begin());
        } else if (onStack.count(v)) {
          low[u] = std::min(low[u], index[v]);
        }
        continue;
      }
      int done = u;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          onStack.erase(w);
          comp.push_back(w);
        } while (w != done);
        if (comp.size() > 1 || succ(done).count(done)) g.cyclic.insert(comp.begin(), comp.end());
      }
    }
  }
  return g;
}

bool constraint_well_formed(const LTA& a, int transition, const DepGraph& g) {
  std::vector<Position> ps;
  constraint_positions(a.transition(transition).psi, ps);
  for (auto& p : ps) {
    std::set<int> frontier{transition};
    for (int j : p) {
      std::set<int> next;
      for (int id : frontier) {
        const Transition& t = a.transition(id);
        if (j < 1 || j > static_cast<int>(t.children.size())) continue;
        int q = t.children[static_cast<size_t>(j) - 1];
        if (g.cyclic.count(q)) return false;
        for (int in : a.incoming(q)) next.insert(in);
      }
      frontier = std::move(next);
    }
  }
  return true;
}

// ---------------------------------------------------------------- conversion and dumps

TermP tree_to_term(const SymTreeP& t) {
  switch (t->sym.kind) {
    case K::Var: return e_var(t->sym.name);
    case K::Const: return e_const(t->sym.lit);
    case K::App: return e_app(tree_to_term(t->kids[1]), tree_to_term(t->kids[2]));
    case K::If:
      return e_if(tree_to_term(t->kids[1]), tree_to_term(t->kids[2]), tree_to_term(t->kids[3]));
    case K::Goal: return tree_to_term(t->kids[1]);
    default: throw std::invalid_argument("not a term tree: " + to_string(t->sym));
  }
}

namespace {

const char* role_name(State::Role r) {
  switch (r) {
    case State::Role::Term: return "term";
    case State::Role::Type: return "type";
    case State::Role::Leaf: return "leaf";
    case State::Role::Goal: return "goal";
  }
  return "?";
}

std::string state_label(const State& s) {
  std::string l = "q" + std::to_string(s.id) + " " + role_name(s.role);
  if (s.role == State::Role::Term)
    l += " " + s.name + " size=" + std::to_string(s.size) + " : " + pretty(s.type);
  else if (s.role == State::Role::Type && s.type)
    l += " " + pretty(s.type);
  if (s.role == State::Role::Term || s.role == State::Role::Goal)
    l += " (type q" + std::to_string(s.typeState) + ")";
  return l;
}

std::string transition_label(const Transition& t) {
  std::string l = "d" + std::to_string(t.id) + ": " + to_string(t.sym) + "(";
  for (size_t i = 0; i < t.children.size(); ++i)
    l += (i ? ", q" : "q") + std::to_string(t.children[i]);
  l += ") -> q" + std::to_string(t.target);
  if (t.psi->kind != Constraint::Kind::True) l += " | " + render_constraint(t.psi);
  return l;
}

std::string dot_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o;
}

}  // namespace

std::string dump_text(const LTA& a) {
  std::ostringstream o;
  o << "depth " << a.depth << "\nfinals";
  for (int f : a.finals) o << " q" << f;
  o << "\n";
  for (int q = 0; q < a.state_count(); ++q)
    if (a.state(q).alive) o << state_label(a.state(q)) << "\n";
  for (int id = 0; id < a.transition_count(); ++id)
    if (a.transition(id).alive) o << transition_label(a.transition(id)) << "\n";
  return o.str();
}

std::string dump_dot(const LTA& a) {
  std::ostringstream o;
  o << "digraph lta {\n  rankdir=BT;\n";
  for (int q = 0; q < a.state_count(); ++q) {
    const State& s = a.state(q);
    if (!s.alive) continue;
    o << "  q" << q << " [label=\"" << dot_escape(state_label(s)) << "\""
      << (a.finals.count(q) ? ", shape=doublecircle" : "") << "];\n";
  }
  for (int id = 0; id < a.transition_count(); ++id) {
    const Transition& t = a.transition(id);
    if (!t.alive) continue;
    o << "  d" << id << " [shape=box, label=\"" << dot_escape(to_string(t.sym)) << "\"];\n";
    o << "  d" << id << " -> q" << t.target << ";\n";
    for (size_t i = 0; i < t.children.size(); ++i)
      o << "  q" << t.children[i] << " -> d" << id << " [label=\"" << i + 1 << "\"];\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace hegel
