#include "hegel/check.hpp"

#include <functional>
#include <map>

namespace hegel {

namespace {

const std::string kValue = "ν";

bool is_uvar(const std::string& n) { return !n.empty() && n[0] == '?'; }

struct Checker {
  Oracle& oracle;
  const Library* lib;
  std::set<std::string> polymorphic;  // bindings generalized over their type variables
  std::map<std::string, BaseType> uvars;
  int fresh = 0;
  std::vector<std::pair<std::string, RTypeP>> instances;
  std::string why;

  // ------------------------------------------------------------ type variables

  BaseType walk(const BaseType& t) const {
    if (t.kind == BaseType::Kind::TyVar) {
      auto it = uvars.find(t.name);
      return it == uvars.end() ? t : walk(it->second);
    }
    BaseType out = t;
    for (auto& a : out.args) a = walk(a);
    return out;
  }

  bool occurs(const std::string& v, const BaseType& t) const {
    if (t.kind == BaseType::Kind::TyVar) return t.name == v;
    for (auto& a : t.args)
      if (occurs(v, a)) return true;
    return false;
  }

  bool unify(const BaseType& x, const BaseType& y) {
    BaseType a = walk(x), b = walk(y);
    if (a == b) return true;
    if (a.kind == BaseType::Kind::TyVar && is_uvar(a.name)) {
      if (occurs(a.name, b)) return false;
      uvars[a.name] = b;
      return true;
    }
    if (b.kind == BaseType::Kind::TyVar && is_uvar(b.name)) return unify(b, a);
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
      if (!unify(a.args[i], b.args[i])) return false;
    return true;
  }

  std::map<std::string, BaseType> solution() const {
    std::map<std::string, BaseType> m;
    for (auto& [v, t] : uvars) m[v] = walk(t);
    return m;
  }

  RTypeP resolve(const RTypeP& t) const { return subst_type_tyvars(t, solution()); }

  static RTypeP body_of(const RTypeP& t) {
    if (t->kind == RType::Kind::ForallTy || t->kind == RType::Kind::ForallPred) return body_of(t->body);
    return t;
  }

  RTypeP instantiate(const RTypeP& t) {
    RTypeP b = body_of(t);
    std::set<std::string> tv;
    collect_type_tyvars(b, tv);
    std::map<std::string, BaseType> m;
    for (auto& v : tv) m[v] = BaseType::Var("?" + std::to_string(++fresh));
    return subst_type_tyvars(b, m);
  }

  // ------------------------------------------------------------ typing

  const RTypeP* lookup(const CheckContext& ctx, const std::string& x) const {
    for (auto it = ctx.bindings.rbegin(); it != ctx.bindings.rend(); ++it)
      if (it->first == x) return &it->second;
    return nullptr;
  }

  RTypeP literal_type(const Literal& l) {
    if (lib)
      for (auto& c : lib->constants)
        if (c.lit == l) return instantiate(c.type);
    switch (l.kind) {
      case Literal::Kind::Int:
        return t_base(kValue, BaseType::Int(), q_bin(Qual::Kind::Eq, q_var(kValue), literal_qual(l)));
      case Literal::Kind::Bool:
        return t_base(kValue, BaseType::Bool(), q_bin(Qual::Kind::Eq, q_var(kValue), literal_qual(l)));
      case Literal::Kind::Nil:
        return t_base(kValue, BaseType::List(BaseType::Var("?" + std::to_string(++fresh))), q_true());
      case Literal::Kind::Unit: return t_base(kValue, BaseType::Unit(), q_true());
    }
    return nullptr;
  }

  QualP atom_name(const TermP& a) {
    return a->kind == Term::Kind::Const ? literal_qual(a->lit) : q_var(a->name);
  }

  RTypeP synth(const CheckContext& ctx, const TermP& e) {
    switch (e->kind) {
      case Term::Kind::Var: {
        const RTypeP* t = lookup(ctx, e->name);
        if (!t) {
          why = "unbound variable " + e->name;
          return nullptr;
        }
        return polymorphic.count(e->name) ? instantiate(*t) : body_of(*t);
      }
      case Term::Kind::Const: return literal_type(e->lit);
      case Term::Kind::TyApp: return synth(ctx, e->kids[0]);
      case Term::Kind::App: {
        RTypeP f = synth(ctx, e->kids[0]);
        if (!f) return nullptr;
        f = body_of(f);
        if (f->kind != RType::Kind::Arrow) {
          why = "applying a non-function in " + pretty(e);
          return nullptr;
        }
        const TermP& arg = e->kids[1];
        if (arg->kind != Term::Kind::Var && arg->kind != Term::Kind::Const) {
          why = "argument not in A-normal form: " + pretty(arg);
          return nullptr;
        }
        RTypeP a = synth(ctx, arg);
        if (!a) return nullptr;
        if (!subtype(ctx, a, f->argType)) {
          why = "argument " + pretty(arg) + " : " + pretty(resolve(a)) + " does not fit " +
                pretty(resolve(f->argType));
          return nullptr;
        }
        QualP name = atom_name(arg);
        if (arg->kind == Term::Kind::Var && polymorphic.count(arg->name) && a->kind == RType::Kind::Base) {
          std::set<std::string> tv;
          collect_type_tyvars(body_of(*lookup(ctx, arg->name)), tv);
          if (!tv.empty()) {
            // This instance of a generic binding gets its own name.
            std::string inst = arg->name + "#" + std::to_string(++fresh);
            instances.emplace_back(inst, a);
            name = q_var(inst);
          }
        }
        return type_subst(f->resType, {{f->argName, name}});
      }
      default:
        why = "cannot synthesize a type for " + pretty(e);
        return nullptr;
    }
  }

  bool check(CheckContext ctx, const TermP& e, const RTypeP& expected0) {
    RTypeP expected = body_of(expected0);
    switch (e->kind) {
      case Term::Kind::Lam: {
        if (expected->kind != RType::Kind::Arrow) {
          why = "lambda against non-arrow type";
          return false;
        }
        ctx.bindings.emplace_back(e->name, expected->argType);
        RTypeP res = type_subst(expected->resType, {{expected->argName, q_var(e->name)}});
        return check(ctx, e->kids[0], res);
      }
      case Term::Kind::Let: {
        RTypeP b = synth(ctx, e->kids[0]);
        if (!b) return false;
        ctx.bindings.emplace_back(e->name, b);
        return check(ctx, e->kids[1], expected);
      }
      case Term::Kind::If: {
        const TermP& c = e->kids[0];
        RTypeP ct = synth(ctx, c);
        if (!ct) return false;
        if (ct->kind != RType::Kind::Base || !unify(ct->base, BaseType::Bool())) {
          why = "condition is not boolean";
          return false;
        }
        QualP name = atom_name(c);
        QualP fact = qual_subst(base_qual_as(ct, kValue), {{kValue, name}});
        CheckContext yes = ctx, no = ctx;
        yes.pathConditions.push_back(q_and2(fact, name));
        no.pathConditions.push_back(q_and2(fact, q_not(name)));
        return check(yes, e->kids[1], expected) && check(no, e->kids[2], expected);
      }
      default: {
        RTypeP t = synth(ctx, e);
        if (!t) return false;
        if (!subtype(ctx, t, expected)) {
          why = pretty(e) + " : " + pretty(resolve(t)) + " is not a subtype of " +
                pretty(resolve(expected));
          return false;
        }
        return true;
      }
    }
  }

  bool subtype(const CheckContext& ctx, const RTypeP& a0, const RTypeP& b0) {
    RTypeP a = body_of(a0), b = body_of(b0);
    if (a->kind == RType::Kind::Base && b->kind == RType::Kind::Base) {
      if (!unify(a->base, b->base)) return false;
      auto m = solution();
      Context env;
      for (auto& [x, t] : ctx.bindings) env.emplace_back(x, subst_type_tyvars(body_of(t), m));
      for (auto& [x, t] : instances) env.emplace_back(x, subst_type_tyvars(t, m));
      std::vector<QualP> props;
      for (auto& p : ctx.pathConditions) props.push_back(qual_subst_tyvars(p, m));
      QualP lhs = qual_subst_tyvars(base_qual_as(a, kValue), m);
      QualP rhs = qual_subst_tyvars(base_qual_as(b, kValue), m);
      return entails(oracle, env, props, lhs, rhs, walk(a->base), kValue).is_valid();
    }
    if (a->kind == RType::Kind::Arrow && b->kind == RType::Kind::Arrow) {
      if (!subtype(ctx, b->argType, a->argType)) return false;
      CheckContext inner = ctx;
      inner.bindings.emplace_back(b->argName, b->argType);
      RTypeP ar = type_subst(a->resType, {{a->argName, q_var(b->argName)}});
      return subtype(inner, ar, b->resType);
    }
    return false;
  }
};

std::set<std::string> library_polymorphic(const Library* lib) {
  std::set<std::string> out;
  if (lib)
    for (auto& [n, t] : lib->components) out.insert(n);
  return out;
}

}  // namespace

CheckContext library_context(const Library& lib) {
  CheckContext ctx;
  for (auto& [n, t] : lib.components) ctx.bindings.emplace_back(n, t);
  return ctx;
}

bool type_check(const CheckContext& ctx, const TermP& t, const RTypeP& expected, Oracle& oracle,
                std::string* why, const Library* lib) {
  if (!anf_valid(t)) {
    if (why) *why = "term is not in A-normal form";
    return false;
  }
  Checker c{oracle, lib, library_polymorphic(lib), {}, 0, {}, {}};
  bool ok = c.check(ctx, t, expected);
  if (!ok && why) *why = c.why;
  return ok;
}

bool subtype_check(const CheckContext& ctx, const RTypeP& t1, const RTypeP& t2, Oracle& oracle) {
  Checker c{oracle, nullptr, {}, {}, 0, {}, {}};
  return c.subtype(ctx, t1, t2);
}

TermP wrap_solution(const Query& query, const TermP& body) {
  TermP t = body;
  for (auto it = query.args.rbegin(); it != query.args.rend(); ++it)
    t = e_lam(it->first, it->second, t);
  return t;
}

// ---------------------------------------------------------------- brute force

namespace {

// Erased shape of an enumerated term: its type with type variables renamed
// to globally fresh unification variables.
struct Shaped {
  TermP term;
  RTypeP shape;
  int size;
  bool cond;  // conditional at the top
};

struct Shaper {
  int fresh = 0;

  RTypeP freshen(const RTypeP& t) {
    std::set<std::string> tv;
    collect_type_tyvars(Checker::body_of(t), tv);
    std::map<std::string, BaseType> m;
    for (auto& v : tv)
      if (is_uvar(v)) m[v] = BaseType::Var("?" + std::to_string(++fresh));
    return subst_type_tyvars(Checker::body_of(t), m);
  }

  static bool unify(const BaseType& x, const BaseType& y, std::map<std::string, BaseType>& s) {
    std::function<BaseType(const BaseType&)> walk = [&](const BaseType& t) {
      if (t.kind == BaseType::Kind::TyVar) {
        auto it = s.find(t.name);
        return it == s.end() ? t : walk(it->second);
      }
      BaseType o = t;
      for (auto& a : o.args) a = walk(a);
      return o;
    };
    std::function<bool(const std::string&, const BaseType&)> occ = [&](const std::string& v,
                                                                       const BaseType& t) {
      if (t.kind == BaseType::Kind::TyVar) return t.name == v;
      for (auto& a : t.args)
        if (occ(v, a)) return true;
      return false;
    };
    BaseType a = walk(x), b = walk(y);
    if (a == b) return true;
    if (a.kind == BaseType::Kind::TyVar && is_uvar(a.name)) {
      if (occ(a.name, b)) return false;
      s[a.name] = b;
      return true;
    }
    if (b.kind == BaseType::Kind::TyVar && is_uvar(b.name)) return unify(b, a, s);
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
      if (!unify(a.args[i], b.args[i], s)) return false;
    return true;
  }

  static bool unify_shape(const RTypeP& a, const RTypeP& b, std::map<std::string, BaseType>& s) {
    if (a->kind == RType::Kind::Base && b->kind == RType::Kind::Base) return unify(a->base, b->base, s);
    if (a->kind == RType::Kind::Arrow && b->kind == RType::Kind::Arrow)
      return unify_shape(a->argType, b->argType, s) && unify_shape(a->resType, b->resType, s);
    return false;
  }

  static RTypeP apply(const RTypeP& t, const std::map<std::string, BaseType>& s) {
    std::map<std::string, BaseType> full;
    std::function<BaseType(const BaseType&)> walk = [&](const BaseType& b) {
      if (b.kind == BaseType::Kind::TyVar) {
        auto it = s.find(b.name);
        return it == s.end() ? b : walk(it->second);
      }
      BaseType o = b;
      for (auto& a : o.args) a = walk(a);
      return o;
    };
    for (auto& [v, b] : s) full[v] = walk(b);
    return subst_type_tyvars(t, full);
  }
};

RTypeP generalize(const RTypeP& t) {
  // Library type variables become unification variables.
  std::set<std::string> tv;
  collect_type_tyvars(Checker::body_of(t), tv);
  std::map<std::string, BaseType> m;
  for (auto& v : tv) m[v] = BaseType::Var("?" + v);
  return subst_type_tyvars(Checker::body_of(t), m);
}

}  // namespace

std::vector<TermP> brute_force_synthesize(const Library& lib, const Query& query, int k,
                                          Oracle& oracle, const BruteOptions& opts) {
  if (static_cast<int>(lib.components.size()) > opts.maxComponents)
    throw CapExceeded("library has " + std::to_string(lib.components.size()) + " components");
  Shaper sh;
  std::vector<std::vector<Shaped>> bySize(static_cast<size_t>(k) + 1);
  for (auto& [n, t] : query.args) bySize[0].push_back({e_var(n), Checker::body_of(t), 0, false});
  for (auto& [n, t] : lib.components) bySize[0].push_back({e_var(n), generalize(t), 0, false});
  std::vector<ConstDecl> consts = lib.constants;
  consts.insert(consts.end(), query.constants.begin(), query.constants.end());
  std::set<Literal> seenLits;
  for (auto& c : consts)
    if (seenLits.insert(c.lit).second) bySize[0].push_back({e_const(c.lit), generalize(c.type), 0, false});

  for (int s = 1; s <= k; ++s) {
    auto& out = bySize[static_cast<size_t>(s)];
    auto try_pair = [&](const Shaped& f, const Shaped& a) {
      RTypeP ft = sh.freshen(f.shape), at = sh.freshen(a.shape);
      if (ft->kind != RType::Kind::Arrow) return;
      std::map<std::string, BaseType> m;
      if (!Shaper::unify_shape(ft->argType, at, m)) return;
      out.push_back({e_app(f.term, a.term), Shaper::apply(ft->resType, m), s, false});
    };
    for (int sf = 0; sf < s; ++sf) {
      int sa = s - std::max(1, sf);
      if (sa < 0) continue;
      for (size_t i = 0; i < bySize[static_cast<size_t>(sf)].size(); ++i)
        for (size_t j = 0; j < bySize[static_cast<size_t>(sa)].size(); ++j)
          try_pair(bySize[static_cast<size_t>(sf)][i], bySize[static_cast<size_t>(sa)][j]);
    }
    // Partial applications of this size applied to size-0 arguments.
    for (size_t i = 0; i < out.size(); ++i) {
      if (out[i].shape->kind != RType::Kind::Arrow) continue;
      for (size_t j = 0; j < bySize[0].size(); ++j) try_pair(out[i], bySize[0][j]);
    }
  }

  RTypeP goal = Checker::body_of(query.result);
  auto fits_goal = [&](const RTypeP& shape) {
    if (shape->kind != RType::Kind::Base) return false;
    std::map<std::string, BaseType> m;
    return Shaper::unify(sh.freshen(shape)->base, goal->base, m);
  };

  std::vector<std::vector<Shaped>> candidates(static_cast<size_t>(k) + 1);
  for (int s = 0; s <= k; ++s)
    for (auto& x : bySize[static_cast<size_t>(s)])
      if (fits_goal(x.shape)) candidates[static_cast<size_t>(s)].push_back(x);
  if (opts.conditionals) {
    for (int s = 1; s <= k; ++s)
      for (int sb = 0; sb <= s; ++sb)
        for (auto& b : bySize[static_cast<size_t>(sb)]) {
          if (b.term->kind == Term::Kind::Const || b.shape->kind != RType::Kind::Base) continue;
          std::map<std::string, BaseType> mb;
          if (!Shaper::unify(sh.freshen(b.shape)->base, BaseType::Bool(), mb)) continue;
          for (int st = 0; st + sb <= s; ++st) {
            int se = s - sb - st;
            for (auto& t : bySize[static_cast<size_t>(st)]) {
              if (!fits_goal(t.shape)) continue;
              for (auto& e : bySize[static_cast<size_t>(se)]) {
                if (!fits_goal(e.shape) || term_equal(t.term, e.term)) continue;
                std::map<std::string, BaseType> m;
                RTypeP tt = sh.freshen(t.shape), et = sh.freshen(e.shape);
                if (!Shaper::unify(tt->base, et->base, m)) continue;
                candidates[static_cast<size_t>(s)].push_back(
                    {e_if(b.term, t.term, e.term), Shaper::apply(tt, m), s, true});
              }
            }
          }
        }
  }

  std::vector<TermP> out;
  CheckContext ctx = library_context(lib);
  RTypeP qt = query.as_type();
  Library withConsts = lib;
  withConsts.constants = consts;
  for (auto& level : candidates)
    for (auto& c : level) {
      TermP sol = wrap_solution(query, to_anf(c.term));
      if (type_check(ctx, sol, qt, oracle, nullptr, &withConsts)) {
        out.push_back(sol);
        if (opts.maxTerms && out.size() >= opts.maxTerms) return out;
      }
    }
  return out;
}

}  // namespace hegel
