#include "hegel/construct.hpp"

#include <algorithm>
#include <functional>

namespace hegel {

using K = Symbol::Kind;

// ---------------------------------------------------------------- canonical types

bool is_flexible(const std::string& tyvar) { return !tyvar.empty() && tyvar[0] == '\''; }

namespace {

RTypeP strip(const RTypeP& t) {
  switch (t->kind) {
    case RType::Kind::Base: return t_base(kNu, t->base, base_qual_as(t, kNu));
    case RType::Kind::Arrow: return t_arrow(t->argName, strip(t->argType), strip(t->resType));
    default: return strip(t->body);
  }
}

void tyvars_in_order(const BaseType& b, std::vector<std::string>& out) {
  if (b.kind == BaseType::Kind::TyVar) {
    if (std::find(out.begin(), out.end(), b.name) == out.end()) out.push_back(b.name);
    return;
  }
  for (auto& a : b.args) tyvars_in_order(a, out);
}

void tyvars_in_order(const QualP& q, std::vector<std::string>& out) {
  if (q->kind == Qual::Kind::Forall || q->kind == Qual::Kind::Exists) tyvars_in_order(q->sort, out);
  for (auto& k : q->kids) tyvars_in_order(k, out);
}

void tyvars_in_order(const RTypeP& t, std::vector<std::string>& out) {
  if (t->kind == RType::Kind::Base) {
    tyvars_in_order(t->base, out);
    tyvars_in_order(t->qual, out);
  } else if (t->kind == RType::Kind::Arrow) {
    tyvars_in_order(t->argType, out);
    tyvars_in_order(t->resType, out);
  }
}

// Renames flexible variables to '0, '1, ... and returns the renaming.
RTypeP canonical_flex(const RTypeP& t, TyInst& renaming) {
  std::vector<std::string> order;
  tyvars_in_order(t, order);
  int n = 0;
  for (auto& v : order)
    if (is_flexible(v) && !renaming.count(v))
      renaming[v] = BaseType::Var("'" + std::to_string(n++));
  return subst_type_tyvars(t, renaming);
}

RTypeP rename_flex(const RTypeP& t, const std::string& suffix) {
  std::vector<std::string> order;
  tyvars_in_order(t, order);
  TyInst m;
  for (auto& v : order)
    if (is_flexible(v)) m[v] = BaseType::Var(v + suffix);
  return subst_type_tyvars(t, m);
}

bool occurs(const std::string& v, const BaseType& t) {
  if (t.kind == BaseType::Kind::TyVar) return t.name == v;
  for (auto& a : t.args)
    if (occurs(v, a)) return true;
  return false;
}

bool unify_shape(const RTypeP& a, const RTypeP& b, TyInst& s) {
  if (a->kind == RType::Kind::Base && b->kind == RType::Kind::Base) return unify(a->base, b->base, s);
  if (a->kind == RType::Kind::Arrow && b->kind == RType::Kind::Arrow)
    return unify_shape(a->argType, b->argType, s) && unify_shape(a->resType, b->resType, s);
  return false;
}

TyInst resolved(const TyInst& s) {
  TyInst out;
  for (auto& [v, t] : s) out[v] = resolve_tyvars(t, s);
  return out;
}

}  // namespace

RTypeP canonical_type(const RTypeP& t, bool flexible) {
  RTypeP s = strip(t);
  if (flexible) {
    std::vector<std::string> order;
    tyvars_in_order(s, order);
    TyInst m;
    for (auto& v : order)
      if (!is_flexible(v)) m[v] = BaseType::Var("'" + v);
    s = subst_type_tyvars(s, m);
  }
  TyInst renaming;
  return canonical_flex(s, renaming);
}

BaseType resolve_tyvars(const BaseType& t, const TyInst& s) {
  if (t.kind == BaseType::Kind::TyVar) {
    auto it = s.find(t.name);
    return it == s.end() ? t : resolve_tyvars(it->second, s);
  }
  BaseType out = t;
  for (auto& a : out.args) a = resolve_tyvars(a, s);
  return out;
}

bool unify(const BaseType& a0, const BaseType& b0, TyInst& s) {
  BaseType a = resolve_tyvars(a0, s), b = resolve_tyvars(b0, s);
  if (a == b) return true;
  if (a.kind == BaseType::Kind::TyVar && is_flexible(a.name)) {
    if (occurs(a.name, b)) return false;
    s[a.name] = b;
    return true;
  }
  if (b.kind == BaseType::Kind::TyVar && is_flexible(b.name)) return unify(b, a, s);
  if (a.kind != b.kind || a.args.size() != b.args.size() || a.name != b.name) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!unify(a.args[i], b.args[i], s)) return false;
  return true;
}

// ---------------------------------------------------------------- interning

namespace {

int interned(ConstructionState& cs, const std::string& key) {
  auto it = cs.interned.find(key);
  if (it == cs.interned.end() || !cs.lta.state(it->second).alive) return -1;
  return it->second;
}

std::string leaf_key(const Symbol& s) {
  switch (s.kind) {
    case K::VarLeaf: return "V|" + s.name;
    case K::BaseLeaf: return "T|" + to_string(s.base);
    case K::QualLeaf: return "Q|" + pretty(s.qual);
    default: throw std::invalid_argument("not a leaf symbol");
  }
}

}  // namespace

int leaf_state(ConstructionState& cs, const Symbol& s) {
  std::string key = leaf_key(s);
  if (int q = interned(cs, key); q >= 0) return q;
  State st;
  st.role = State::Role::Leaf;
  st.key = key;
  int q = cs.lta.add_state(st);
  cs.lta.add_transition(s, {}, c_true(), q);
  cs.interned[key] = q;
  return q;
}

int type_state(ConstructionState& cs, const RTypeP& t, const std::string& binder) {
  bool base = t->kind == RType::Kind::Base;
  std::string key = (base ? "B|" : "A|") + binder + "|" + pretty(t);
  if (int q = interned(cs, key); q >= 0) return q;
  std::vector<int> kids;
  if (base) {
    kids = {leaf_state(cs, Symbol::var_leaf(binder)), leaf_state(cs, Symbol::base_leaf(t->base)),
            leaf_state(cs, Symbol::qual_leaf(t->qual))};
  } else {
    kids = {type_state(cs, t->argType, t->argName), type_state(cs, t->resType, kNu)};
  }
  State st;
  st.role = State::Role::Type;
  st.name = binder;
  st.type = t;
  st.key = key;
  int q = cs.lta.add_state(st);
  cs.lta.add_transition(Symbol::of(base ? K::TyBase : K::TyArrow), kids, c_true(), q);
  cs.interned[key] = q;
  return q;
}

namespace {

int term_state(ConstructionState& cs, const std::string& key, K kind, const std::string& name,
               const RTypeP& type, int size) {
  if (int q = interned(cs, key); q >= 0) return q;
  int ts = type_state(cs, type, kNu);
  State st;
  st.role = State::Role::Term;
  st.name = name;
  st.type = type;
  st.size = size;
  st.typeState = ts;
  st.termKind = kind;
  st.key = key;
  int q = cs.lta.add_state(st);
  if (name.empty()) cs.lta.state_mut(q).name = "t@" + std::to_string(q);
  cs.interned[key] = q;
  return q;
}

QualP state_name_qual(const LTA& a, int q) {
  const State& s = a.state(q);
  if (s.termKind == K::Const)
    for (int t : a.incoming(q))
      if (a.transition(t).sym.kind == K::Const) return literal_qual(a.transition(t).sym.lit);
  return q_var(s.name);
}

bool intermediate(const State& s) { return s.termKind == K::App || s.termKind == K::If; }

// Pushes ∃b:sort. φ_b ∧ φ into the final result refinement; fails when the
// replaced name also occurs in a parameter type.
std::optional<RTypeP> close_exists(const RTypeP& t, const std::string& x, const std::string& b,
                                   const BaseType& sort, const QualP& phiB) {
  if (t->kind == RType::Kind::Base) {
    QualP body = q_and2(phiB, qual_subst(t->qual, {{x, q_var(b)}}));
    return t_base(kNu, t->base, q_quant(Qual::Kind::Exists, b, sort, body));
  }
  if (type_free_vars(t->argType).count(x)) return std::nullopt;
  auto res = close_exists(t->resType, x, b, sort, phiB);
  if (!res) return std::nullopt;
  return t_arrow(t->argName, t->argType, *res);
}

Position cat(Position p, std::initializer_list<int> tail) {
  p.insert(p.end(), tail);
  return p;
}

}  // namespace

// ---------------------------------------------------------------- SubType

ConstraintP subtype_constraint(const RTypeP& ti, const Position& pi, const RTypeP& tj,
                               const Position& pj) {
  if (ti->kind == RType::Kind::Base && tj->kind == RType::Kind::Base)
    return c_and({c_syn(cat(pi, {2}), cat(pj, {2})), c_sem(cat(pi, {3}), cat(pj, {3}))});
  if (ti->kind == RType::Kind::Arrow && tj->kind == RType::Kind::Arrow) {
    auto in = subtype_constraint(tj->argType, cat(pj, {1}), ti->argType, cat(pi, {1}));
    PosSubst th;
    th.pairs.push_back({cat(pj, {1}), cat(pi, {1})});
    auto out = subtype_constraint(ti->resType, cat(pi, {2}), tj->resType, cat(pj, {2}));
    return c_and({in, c_subst(th, out)});
  }
  return c_true();
}

ConstraintP subtype_constraint(const LTA& a, int di, int dj) {
  std::function<RTypeP(int)> type_of = [&](int d) -> RTypeP {
    const Transition& t = a.transition(d);
    auto child = [&](int i) { return a.incoming(t.children[static_cast<size_t>(i)]).at(0); };
    if (t.sym.kind == K::TyBase) {
      const Transition& b = a.transition(child(1));
      const Transition& q = a.transition(child(2));
      return t_base(kNu, b.sym.base, q.sym.qual);
    }
    if (t.sym.kind == K::TyArrow) return t_arrow("_", type_of(child(0)), type_of(child(1)));
    throw std::invalid_argument("subtype_constraint needs type transitions");
  };
  return subtype_constraint(type_of(di), {1}, type_of(dj), {2});
}

// ---------------------------------------------------------------- application

std::optional<AppPlan> plan_app(const ConstructionState& cs, int fun, int arg) {
  const LTA& a = cs.lta;
  const State& F = a.state(fun);
  const State& A = a.state(arg);
  if (F.type->kind != RType::Kind::Arrow) return std::nullopt;
  RTypeP f = rename_flex(F.type, "f");
  RTypeP at = rename_flex(A.type, "a");
  TyInst s;
  if (!unify_shape(f->argType, at, s)) return std::nullopt;
  TyInst r = resolved(s);
  RTypeP out = subst_type_tyvars(f->resType, r);
  const std::string& x = f->argName;
  // A polymorphic variable's binding keeps its generic sort in the
  // environment, so its name cannot stand for this instance.
  std::set<std::string> argVars;
  collect_type_tyvars(A.type, argVars);
  bool generic = A.termKind == K::Var &&
                 std::any_of(argVars.begin(), argVars.end(), [](auto& v) { return is_flexible(v); });
  if (!intermediate(A) && !generic) {
    out = type_subst(out, {{x, state_name_qual(a, arg)}});
  } else if (type_free_vars(out).count(x)) {
    if (at->kind != RType::Kind::Base) return std::nullopt;
    RTypeP atr = subst_type_tyvars(at, r);
    std::string b = "e@" + std::to_string(arg);
    auto closed = close_exists(out, x, b, atr->base, base_qual_as(atr, b));
    // A later parameter depends on the argument: keep its binder by name.
    out = closed ? *closed : type_subst(out, {{x, q_var(A.name)}});
  }
  TyInst canon;
  AppPlan p;
  p.result = canonical_flex(out, canon);
  // Leftover variables that vanished from the result still need stable names.
  int next = static_cast<int>(canon.size());
  auto inst_for = [&](const RTypeP& orig, const std::string& suffix) {
    std::vector<std::string> order;
    tyvars_in_order(orig, order);
    TyInst m;
    for (auto& v : order) {
      if (!is_flexible(v)) continue;
      BaseType t = resolve_tyvars(BaseType::Var(v + suffix), r);
      std::vector<std::string> left;
      tyvars_in_order(t, left);
      for (auto& l : left)
        if (is_flexible(l) && !canon.count(l)) canon[l] = BaseType::Var("'" + std::to_string(next++));
      m[v] = subst_tyvars(t, canon);
    }
    return m;
  };
  TyInst instF = inst_for(F.type, "f");
  TyInst instA = inst_for(A.type, "a");
  p.alpha = instF;
  p.inst = std::make_shared<const std::vector<TyInst>>(std::vector<TyInst>{{}, instF, instA});
  if (p.result->kind == RType::Kind::Base) p.kappa = p.result->qual;
  return p;
}

namespace {

ConstraintP app_constraint(const RTypeP& funType, const RTypeP& argType, const RTypeP& result) {
  PosSubst th;
  th.pairs.push_back({{3}, {2, 1, 1}});
  return c_and({subtype_constraint(argType, {3, 1}, funType->argType, {2, 1, 1}),
                c_subst(th, subtype_constraint(funType->resType, {2, 1, 2}, result, {1}))});
}

int callcost(const State& s) { return std::max(1, s.size); }

bool goal_compatible(const ConstructionState& cs, const RTypeP& t, TyInst& s) {
  if (t->kind != RType::Kind::Base) return false;
  RTypeP g = cs.lta.state(cs.goal).type;
  RTypeP r = rename_flex(t, "t");
  return unify(g->base, r->base, s);
}

void wire_goal(ConstructionState& cs, int q) {
  const State& st = cs.lta.state(q);
  TyInst s;
  if (!goal_compatible(cs, st.type, s)) return;
  TyInst r = resolved(s), inst;
  std::vector<std::string> order;
  tyvars_in_order(st.type, order);
  for (auto& v : order)
    if (is_flexible(v)) inst[v] = resolve_tyvars(BaseType::Var(v + "t"), r);
  RTypeP goalT = cs.lta.state(cs.goal).type;
  auto psi = subtype_constraint(st.type, {2, 1}, goalT, {1});
  cs.lta.add_transition(Symbol::of(K::Goal), {cs.goalType, q}, psi, cs.goal,
                        std::make_shared<const std::vector<TyInst>>(std::vector<TyInst>{{}, inst}));
}

void check_wf(const RTypeP& t, std::set<std::string> scope, const std::set<std::string>& globals,
              const std::string& owner) {
  switch (t->kind) {
    case RType::Kind::Base:
      for (auto& v : free_vars(t->qual))
        if (v != t->var && !scope.count(v) && !globals.count(v))
          throw IllFormedType(owner + ": unbound name " + v + " in " + pretty(t));
      break;
    case RType::Kind::Arrow:
      check_wf(t->argType, scope, globals, owner);
      scope.insert(t->argName);
      check_wf(t->resType, scope, globals, owner);
      break;
    default:
      check_wf(t->body, scope, globals, owner);
  }
}

RTypeP binders_apart(const RTypeP& t, std::set<std::string>& avoid) {
  switch (t->kind) {
    case RType::Kind::Arrow: {
      std::string x = t->argName;
      RTypeP res = t->resType;
      if (avoid.count(x)) {
        std::set<std::string> av = avoid;
        auto fv = type_free_vars(res);
        av.insert(fv.begin(), fv.end());
        std::string nx = fresh_name(x, av);
        res = type_subst(res, {{x, q_var(nx)}});
        x = nx;
      }
      avoid.insert(x);
      RTypeP arg = binders_apart(t->argType, avoid);
      return t_arrow(x, arg, binders_apart(res, avoid));
    }
    case RType::Kind::ForallTy: return t_forall_ty(t->binder, binders_apart(t->body, avoid));
    case RType::Kind::ForallPred:
      return t_forall_pred(t->binder, t->predSort, binders_apart(t->body, avoid));
    default: return t;
  }
}

void collect_pred_vars(const RTypeP& t, std::vector<PredDecl>& out) {
  if (t->kind == RType::Kind::ForallPred) {
    out.push_back({t->binder, t->predSort});
    collect_pred_vars(t->body, out);
  } else if (t->kind == RType::Kind::ForallTy) {
    collect_pred_vars(t->body, out);
  }
}

void dependent_params(const RTypeP& t, std::vector<RTypeP>& out) {
  if (t->kind != RType::Kind::Arrow) return;
  if (type_free_vars(t->resType).count(t->argName)) out.push_back(t->argType);
  dependent_params(t->resType, out);
}

}  // namespace

// ---------------------------------------------------------------- initial automaton

ConstructionState wf_init(const Library& lib, const Query& query, ConstructionOptions opts) {
  ConstructionState cs;
  cs.query = query;
  cs.opts = opts;
  cs.lib = lib;

  std::set<std::string> globals, avoid;
  for (auto& [n, t] : query.args) avoid.insert(n);
  for (auto& [n, t] : lib.components) {
    avoid.insert(n);
    if (t->kind == RType::Kind::Base) globals.insert(n);
  }
  for (auto& [n, t] : cs.lib.components) {
    t = binders_apart(t, avoid);
    check_wf(t, {}, globals, n);
  }
  {
    std::set<std::string> scope;
    for (auto& [n, t] : query.args) {
      check_wf(t, scope, globals, query.name);
      scope.insert(n);
    }
    check_wf(query.result, scope, globals, query.name);
  }

  auto mention = [&](const RTypeP& t) {
    auto fv = type_free_vars(t);
    cs.mentioned.insert(fv.begin(), fv.end());
  };
  mention(query.result);
  for (auto& [n, t] : query.args) mention(t);
  for (auto& [n, t] : cs.lib.components) {
    mention(t);
    collect_pred_vars(t, cs.predVars);
    dependent_params(canonical_type(t, true), cs.dependentParams);
    if (t->kind != RType::Kind::Base) cs.functions.insert(n);
  }
  for (auto& [n, t] : query.args)
    if (t->kind != RType::Kind::Base) cs.functions.insert(n);

  RTypeP goalT = canonical_type(query.result, false);
  if (goalT->kind != RType::Kind::Base) throw IllFormedType(query.name + ": result is not a base type");
  cs.goalType = type_state(cs, goalT, kNu);
  cs.lta.pinned.insert(cs.goalType);
  State g;
  g.role = State::Role::Goal;
  g.name = "goal";
  g.type = goalT;
  g.typeState = cs.goalType;
  g.key = "goal";
  cs.goal = cs.lta.add_state(g);
  cs.lta.finals.insert(cs.goal);

  std::vector<int> terms;
  auto add_var = [&](const std::string& n, const RTypeP& t, bool flexible) {
    RTypeP ct = canonical_type(t, flexible);
    int q = term_state(cs, "var|" + n, K::Var, n, ct, 0);
    if (cs.lta.incoming(q).empty())
      cs.lta.add_transition(Symbol::var(n), {cs.lta.state(q).typeState}, c_true(), q);
    terms.push_back(q);
  };
  for (auto& [n, t] : query.args) add_var(n, t, false);
  for (auto& [n, t] : cs.lib.components) add_var(n, t, true);
  std::vector<ConstDecl> consts = lib.constants;
  consts.insert(consts.end(), query.constants.begin(), query.constants.end());
  for (auto& c : consts) {
    std::string key = "const|" + to_string(c.lit);
    if (interned(cs, key) >= 0) continue;
    RTypeP ct = canonical_type(c.type, true);
    int q = term_state(cs, key, K::Const, to_string(c.lit), ct, 0);
    cs.lta.add_transition(Symbol::constant(c.lit), {cs.lta.state(q).typeState}, c_true(), q);
    terms.push_back(q);
  }
  for (int q : terms) wire_goal(cs, q);
  return cs;
}

// ---------------------------------------------------------------- placeholders

int add_placeholder_app(ConstructionState& cs, int fun, int arg) {
  int n = ++cs.freshAlpha;
  ++cs.freshKappa;
  std::string alpha = "α" + std::to_string(n), kappa = "κ" + std::to_string(cs.freshKappa);
  RTypeP shape = t_base(kNu, BaseType::Var(alpha), q_kvar(kappa));
  int ts = type_state(cs, shape, kNu);
  const State& F = cs.lta.state(fun);
  int size = callcost(F) + cs.lta.state(arg).size;
  State st;
  st.role = State::Role::Term;
  st.type = shape;
  st.size = size;
  st.typeState = ts;
  st.termKind = K::App;
  st.key = "pending|" + std::to_string(n);
  int q = cs.lta.add_state(st);
  cs.lta.state_mut(q).name = "t@" + std::to_string(q);
  ConstraintP psi = c_true();
  if (F.type->kind == RType::Kind::Arrow)
    psi = app_constraint(F.type, cs.lta.state(arg).type, shape);
  return cs.lta.add_transition(Symbol::of(K::App), {ts, fun, arg}, psi, q);
}

Inference infer_transition_types(ConstructionState& cs, int transition) {
  Transition t = cs.lta.transition(transition);
  Inference inf;
  int fun = t.children[1], arg = t.children[2];
  RTypeP shape = cs.lta.state(t.children[0]).type;
  auto plan = plan_app(cs, fun, arg);
  cs.lta.remove_transition(transition);
  if (!plan) {
    cs.lta.add_transition(Symbol::of(K::Bottom), {}, c_false(), t.target);
    return inf;
  }
  const State& F = cs.lta.state(fun);
  int size = callcost(F) + cs.lta.state(arg).size;
  int q = term_state(cs, "app|" + std::to_string(size) + "|" + pretty(plan->result), K::App, "",
                     plan->result, size);
  auto psi = app_constraint(F.type, cs.lta.state(arg).type, plan->result);
  inf.transition = cs.lta.add_transition(Symbol::of(K::App), {cs.lta.state(q).typeState, fun, arg},
                                         psi, q, plan->inst);
  cs.appPairs.insert({fun, arg});
  if (shape->kind == RType::Kind::Base) {
    if (shape->base.kind == BaseType::Kind::TyVar && plan->result->kind == RType::Kind::Base)
      inf.alpha[shape->base.name] = plan->result->base;
    if (shape->qual->kind == Qual::Kind::KVar && plan->kappa) inf.kappa[shape->qual->name] = plan->kappa;
  }
  if (cs.lta.incoming(t.target).empty() && cs.lta.state(t.target).key.rfind("pending|", 0) == 0)
    cs.lta.remove_state(t.target);
  return inf;
}

// ---------------------------------------------------------------- expansion round

namespace {

bool live_term(const LTA& a, int q) {
  const State& s = a.state(q);
  return s.alive && s.role == State::Role::Term && s.key.rfind("pending|", 0) != 0 &&
         !a.incoming(q).empty();
}

void add_ifs(ConstructionState& cs, int r, std::vector<int>& created) {
  LTA& a = cs.lta;
  std::map<int, std::vector<int>> conds, branches;
  for (int q = 0; q < a.state_count(); ++q) {
    if (!live_term(a, q)) continue;
    const State& s = a.state(q);
    if (s.termKind == K::If || s.size >= r || s.type->kind != RType::Kind::Base) continue;
    if (s.type->base.kind == BaseType::Kind::Bool && s.termKind != K::Const) conds[s.size].push_back(q);
    TyInst probe;
    if (goal_compatible(cs, s.type, probe)) branches[s.size].push_back(q);
  }
  for (auto& [sb, bs] : conds)
    for (int b : bs)
      for (auto& [st, ts] : branches)
        for (int t : ts) {
          int se = r - sb - st;
          auto it = branches.find(se);
          if (se < 0 || it == branches.end()) continue;
          for (int e : it->second) {
            if (t == e || !cs.ifTriples.insert({b, t, e}).second) continue;
            RTypeP tt = rename_flex(a.state(t).type, "t");
            RTypeP et = rename_flex(a.state(e).type, "e");
            TyInst s;
            if (!unify(tt->base, et->base, s)) continue;
            TyInst res = resolved(s);
            tt = subst_type_tyvars(tt, res);
            et = subst_type_tyvars(et, res);
            QualP phiT = tt->qual, phiE = et->qual;
            const State& B = a.state(b);
            QualP qual;
            if (intermediate(B)) {
              std::string c = "c@" + std::to_string(b);
              QualP cv = q_var(c);
              qual = q_quant(Qual::Kind::Exists, c, BaseType::Bool(),
                             q_and({base_qual_as(B.type, c), q_implies(cv, phiT),
                                    q_implies(q_not(cv), phiE)}));
            } else {
              QualP cv = q_var(B.name);
              qual = q_and2(q_implies(cv, phiT), q_implies(q_not(cv), phiE));
            }
            TyInst canon;
            RTypeP result = canonical_flex(t_base(kNu, tt->base, qual), canon);
            auto inst_for = [&](const RTypeP& orig, const std::string& suffix) {
              std::vector<std::string> order;
              tyvars_in_order(orig, order);
              TyInst m;
              for (auto& v : order)
                if (is_flexible(v))
                  m[v] = subst_tyvars(resolve_tyvars(BaseType::Var(v + suffix), res), canon);
              return m;
            };
            auto inst = std::make_shared<const std::vector<TyInst>>(std::vector<TyInst>{
                {}, {}, inst_for(a.state(t).type, "t"), inst_for(a.state(e).type, "e")});
            ConstraintP psi = c_and(
                {c_assume({2}, true, subtype_constraint(a.state(t).type, {3, 1}, result, {1})),
                 c_assume({2}, false, subtype_constraint(a.state(e).type, {4, 1}, result, {1}))});
            int before = a.state_count();
            int q = term_state(cs, "if|" + std::to_string(r) + "|" + pretty(result), K::If, "",
                               result, r);
            if (a.state_count() > before) created.push_back(q);
            a.add_transition(Symbol::of(K::If), {a.state(q).typeState, b, t, e}, psi, q, inst);
          }
        }
}

}  // namespace

std::vector<int> transition_step(ConstructionState& cs) {
  LTA& a = cs.lta;
  int r = ++a.depth;
  int firstTransition = a.transition_count();
  std::map<int, std::vector<int>> argsBySize;
  for (int q = 0; q < a.state_count(); ++q)
    if (live_term(a, q) && a.state(q).size < r) argsBySize[a.state(q).size].push_back(q);

  std::vector<int> created;
  for (int f = 0; f < a.state_count(); ++f) {
    if (!live_term(a, f)) continue;
    const State& F = a.state(f);
    if (F.type->kind != RType::Kind::Arrow || callcost(F) > r) continue;
    auto it = argsBySize.find(r - callcost(F));
    if (it == argsBySize.end()) continue;
    for (int x : it->second) {
      if (!cs.appPairs.insert({f, x}).second) continue;
      auto plan = plan_app(cs, f, x);
      if (!plan) continue;
      for (auto& n : type_free_vars(plan->result)) cs.mentioned.insert(n);
      int before = a.state_count();
      int q = term_state(cs, "app|" + std::to_string(r) + "|" + pretty(plan->result), K::App, "",
                         plan->result, r);
      if (a.state_count() > before) created.push_back(q);
      const State& Fs = a.state(f);
      auto psi = app_constraint(Fs.type, a.state(x).type, plan->result);
      a.add_transition(Symbol::of(K::App), {a.state(q).typeState, f, x}, psi, q, plan->inst);
    }
  }
  if (cs.opts.conditionals) add_ifs(cs, r, created);
  for (int q : created)
    if (a.state(q).termKind == K::App || a.state(q).termKind == K::If) wire_goal(cs, q);

  DepGraph g = dependency_graph(a);
  for (int id = firstTransition; id < a.transition_count(); ++id)
    if (a.transition(id).alive && !constraint_well_formed(a, id, g))
      throw CycleConstraintViolation("transition d" + std::to_string(id));
  return created;
}

// ---------------------------------------------------------------- environment

Context build_env(const LTA& a) {
  Context ctx;
  for (int q = 0; q < a.state_count(); ++q) {
    const State& s = a.state(q);
    if (!s.alive || s.role != State::Role::Term || s.termKind == K::Const) continue;
    if (s.key.rfind("pending|", 0) == 0) continue;
    ctx.emplace_back(s.name, s.type);
  }
  return ctx;
}

bool name_insensitive(const ConstructionState& cs, int q) {
  const State& s = cs.lta.state(q);
  if (s.termKind != K::Var && s.termKind != K::Const) return !cs.mentioned.count(s.name);
  if (s.type->kind != RType::Kind::Base) return false;
  if (cs.mentioned.count(s.name)) return false;
  for (auto& p : cs.dependentParams) {
    TyInst m;
    if (p->kind == RType::Kind::Base && unify(p->base, rename_flex(s.type, "s")->base, m)) return false;
  }
  if (cs.opts.conditionals && s.type->base.kind == BaseType::Kind::Bool) return false;
  return true;
}

}  // namespace hegel
