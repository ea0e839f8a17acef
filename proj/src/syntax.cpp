#include "hegel/syntax.hpp"

#include <algorithm>
#include <functional>

namespace hegel {

// ---------------------------------------------------------------- base types

std::string to_string(const BaseType& t) {
  switch (t.kind) {
    case BaseType::Kind::Int: return "int";
    case BaseType::Kind::Bool: return "bool";
    case BaseType::Kind::Char: return "char";
    case BaseType::Kind::Unit: return "unit";
    case BaseType::Kind::TyVar: return t.name;
    case BaseType::Kind::List: return "[" + to_string(t.args[0]) + "]";
    case BaseType::Kind::Pair:
      return "(" + to_string(t.args[0]) + ", " + to_string(t.args[1]) + ")";
  }
  return "?";
}

void collect_tyvars(const BaseType& t, std::set<std::string>& out) {
  if (t.kind == BaseType::Kind::TyVar) out.insert(t.name);
  for (auto& a : t.args) collect_tyvars(a, out);
}

BaseType subst_tyvars(const BaseType& t, const std::map<std::string, BaseType>& m) {
  if (t.kind == BaseType::Kind::TyVar) {
    auto it = m.find(t.name);
    return it == m.end() ? t : it->second;
  }
  BaseType r = t;
  for (auto& a : r.args) a = subst_tyvars(a, m);
  return r;
}

// ---------------------------------------------------------------- qualifiers

namespace {
QualP mk(Qual q) { return std::make_shared<const Qual>(std::move(q)); }
}  // namespace

QualP q_var(const std::string& n) { return mk({Qual::Kind::Var, n, 0, false, {}, {}}); }
QualP q_int(std::int64_t v) { return mk({Qual::Kind::IntLit, {}, v, false, {}, {}}); }
QualP q_bool(bool b) { return mk({Qual::Kind::BoolLit, {}, 0, b, {}, {}}); }
QualP q_true() {
  static QualP t = q_bool(true);
  return t;
}
QualP q_false() {
  static QualP f = q_bool(false);
  return f;
}
QualP q_nil() { return mk({Qual::Kind::Nil, {}, 0, false, {}, {}}); }
QualP q_unit() { return mk({Qual::Kind::UnitLit, {}, 0, false, {}, {}}); }
QualP q_app(const std::string& f, std::vector<QualP> args) {
  return mk({Qual::Kind::App, f, 0, false, {}, std::move(args)});
}
QualP q_bin(Qual::Kind k, QualP a, QualP b) {
  return mk({k, {}, 0, false, {}, {std::move(a), std::move(b)}});
}
QualP q_neg(QualP a) { return mk({Qual::Kind::Neg, {}, 0, false, {}, {std::move(a)}}); }
QualP q_not(QualP a) {
  if (is_true(a)) return q_false();
  if (is_false(a)) return q_true();
  return mk({Qual::Kind::Not, {}, 0, false, {}, {std::move(a)}});
}

QualP q_and(std::vector<QualP> xs) {
  std::vector<QualP> flat;
  for (auto& x : xs) {
    if (is_true(x)) continue;
    if (is_false(x)) return q_false();
    if (x->kind == Qual::Kind::And)
      for (auto& k : x->kids) flat.push_back(k);
    else
      flat.push_back(x);
  }
  if (flat.empty()) return q_true();
  if (flat.size() == 1) return flat[0];
  return mk({Qual::Kind::And, {}, 0, false, {}, std::move(flat)});
}

QualP q_or(std::vector<QualP> xs) {
  std::vector<QualP> flat;
  for (auto& x : xs) {
    if (is_false(x)) continue;
    if (is_true(x)) return q_true();
    if (x->kind == Qual::Kind::Or)
      for (auto& k : x->kids) flat.push_back(k);
    else
      flat.push_back(x);
  }
  if (flat.empty()) return q_false();
  if (flat.size() == 1) return flat[0];
  return mk({Qual::Kind::Or, {}, 0, false, {}, std::move(flat)});
}

QualP q_and2(QualP a, QualP b) { return q_and({std::move(a), std::move(b)}); }

QualP q_implies(QualP a, QualP b) {
  if (is_true(a)) return b;
  if (is_false(a) || is_true(b)) return q_true();
  return mk({Qual::Kind::Implies, {}, 0, false, {}, {std::move(a), std::move(b)}});
}

QualP q_quant(Qual::Kind k, const std::string& v, BaseType s, QualP body) {
  return mk({k, v, 0, false, std::move(s), {std::move(body)}});
}

QualP q_kvar(const std::string& n) { return mk({Qual::Kind::KVar, n, 0, false, {}, {}}); }

bool is_true(const QualP& q) { return q->kind == Qual::Kind::BoolLit && q->bval; }
bool is_false(const QualP& q) { return q->kind == Qual::Kind::BoolLit && !q->bval; }

bool is_relational(Qual::Kind k) {
  return k == Qual::Kind::Eq || k == Qual::Kind::Ne || k == Qual::Kind::Lt ||
         k == Qual::Kind::Le || k == Qual::Kind::Gt || k == Qual::Kind::Ge;
}
bool is_arith(Qual::Kind k) {
  return k == Qual::Kind::Add || k == Qual::Kind::Sub || k == Qual::Kind::Mul ||
         k == Qual::Kind::Neg;
}

bool qual_equal(const QualP& a, const QualP& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->ival != b->ival || a->bval != b->bval ||
      !(a->sort == b->sort) || a->kids.size() != b->kids.size())
    return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!qual_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------- types

namespace {
RTypeP mkt(RType t) { return std::make_shared<const RType>(std::move(t)); }
}  // namespace

RTypeP t_base(const std::string& v, BaseType b, QualP q) {
  RType t{RType::Kind::Base, v, std::move(b), std::move(q), {}, {}, {}, {}, {}, {}};
  return mkt(std::move(t));
}
RTypeP t_arrow(const std::string& x, RTypeP a, RTypeP r) {
  RType t{RType::Kind::Arrow, {}, {}, {}, x, std::move(a), std::move(r), {}, {}, {}};
  return mkt(std::move(t));
}
RTypeP t_forall_ty(const std::string& a, RTypeP body) {
  RType t{RType::Kind::ForallTy, {}, {}, {}, {}, {}, {}, a, {}, std::move(body)};
  return mkt(std::move(t));
}
RTypeP t_forall_pred(const std::string& p, PredSort s, RTypeP body) {
  RType t{RType::Kind::ForallPred, {}, {}, {}, {}, {}, {}, p, std::move(s), std::move(body)};
  return mkt(std::move(t));
}

bool type_equal(const RTypeP& a, const RTypeP& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case RType::Kind::Base:
      return a->var == b->var && a->base == b->base && qual_equal(a->qual, b->qual);
    case RType::Kind::Arrow:
      return a->argName == b->argName && type_equal(a->argType, b->argType) &&
             type_equal(a->resType, b->resType);
    case RType::Kind::ForallTy:
      return a->binder == b->binder && type_equal(a->body, b->body);
    case RType::Kind::ForallPred:
      return a->binder == b->binder && a->predSort == b->predSort && type_equal(a->body, b->body);
  }
  return false;
}

std::string erased_key(const RTypeP& t) {
  switch (t->kind) {
    case RType::Kind::Base: return to_string(t->base);
    case RType::Kind::Arrow:
      return "(" + erased_key(t->argType) + " -> " + erased_key(t->resType) + ")";
    case RType::Kind::ForallTy:
    case RType::Kind::ForallPred: return erased_key(t->body);
  }
  return "?";
}

int arity(const RTypeP& t) {
  if (t->kind == RType::Kind::Arrow) return 1 + arity(t->resType);
  if (t->kind == RType::Kind::ForallTy || t->kind == RType::Kind::ForallPred)
    return arity(t->body);
  return 0;
}

void collect_type_tyvars(const RTypeP& t, std::set<std::string>& out) {
  switch (t->kind) {
    case RType::Kind::Base: collect_tyvars(t->base, out); break;
    case RType::Kind::Arrow:
      collect_type_tyvars(t->argType, out);
      collect_type_tyvars(t->resType, out);
      break;
    case RType::Kind::ForallTy: {
      std::set<std::string> inner;
      collect_type_tyvars(t->body, inner);
      inner.erase(t->binder);
      out.insert(inner.begin(), inner.end());
      break;
    }
    case RType::Kind::ForallPred: collect_type_tyvars(t->body, out); break;
  }
}

RTypeP subst_type_tyvars(const RTypeP& t, const std::map<std::string, BaseType>& m) {
  if (m.empty()) return t;
  switch (t->kind) {
    case RType::Kind::Base:
      return t_base(t->var, subst_tyvars(t->base, m), qual_subst_tyvars(t->qual, m));
    case RType::Kind::Arrow:
      return t_arrow(t->argName, subst_type_tyvars(t->argType, m),
                     subst_type_tyvars(t->resType, m));
    case RType::Kind::ForallTy: {
      auto inner = m;
      inner.erase(t->binder);
      return t_forall_ty(t->binder, subst_type_tyvars(t->body, inner));
    }
    case RType::Kind::ForallPred: {
      PredSort s = t->predSort;
      for (auto& a : s.args) a = subst_tyvars(a, m);
      s.result = subst_tyvars(s.result, m);
      return t_forall_pred(t->binder, s, subst_type_tyvars(t->body, m));
    }
  }
  return t;
}

// ---------------------------------------------------------------- literals

std::string to_string(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Int: return std::to_string(l.value);
    case Literal::Kind::Bool: return l.value ? "true" : "false";
    case Literal::Kind::Nil: return "[]";
    case Literal::Kind::Unit: return "()";
  }
  return "?";
}

QualP literal_qual(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Int: return q_int(l.value);
    case Literal::Kind::Bool: return q_bool(l.value != 0);
    case Literal::Kind::Nil: return q_nil();
    case Literal::Kind::Unit: return q_unit();
  }
  return q_true();
}

// ---------------------------------------------------------------- terms

namespace {
TermP mke(Term t) { return std::make_shared<const Term>(std::move(t)); }
}  // namespace

TermP e_var(const std::string& n) { return mke({Term::Kind::Var, n, {}, {}, {}, {}}); }
TermP e_const(Literal l) { return mke({Term::Kind::Const, {}, l, {}, {}, {}}); }
TermP e_app(TermP f, TermP a) {
  return mke({Term::Kind::App, {}, {}, {}, {}, {std::move(f), std::move(a)}});
}
TermP e_apps(TermP f, const std::vector<TermP>& args) {
  for (auto& a : args) f = e_app(f, a);
  return f;
}
TermP e_tyapp(TermP t, BaseType b) {
  return mke({Term::Kind::TyApp, {}, {}, std::move(b), {}, {std::move(t)}});
}
TermP e_if(TermP c, TermP t, TermP e) {
  return mke({Term::Kind::If, {}, {}, {}, {}, {std::move(c), std::move(t), std::move(e)}});
}
TermP e_let(const std::string& x, TermP b, TermP body) {
  return mke({Term::Kind::Let, x, {}, {}, {}, {std::move(b), std::move(body)}});
}
TermP e_lam(const std::string& x, RTypeP t, TermP body) {
  return mke({Term::Kind::Lam, x, {}, {}, std::move(t), {std::move(body)}});
}

bool term_equal(const TermP& a, const TermP& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || !(a->lit == b->lit) ||
      !(a->tyArg == b->tyArg) || a->kids.size() != b->kids.size())
    return false;
  if (a->kind == Term::Kind::Lam && (a->argType || b->argType)) {
    if (!a->argType || !b->argType || !type_equal(a->argType, b->argType)) return false;
  }
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!term_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

bool term_less(const TermP& a, const TermP& b) { return pretty(a) < pretty(b); }

int call_count(const TermP& t, const std::set<std::string>& functions) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return 0;
    case Term::Kind::App: {
      int n = 0;
      const Term* h = t.get();
      while (h->kind == Term::Kind::App || h->kind == Term::Kind::TyApp) {
        if (h->kind == Term::Kind::App) n += call_count(h->kids[1], functions);
        h = h->kids[0].get();
      }
      if (h->kind == Term::Kind::Var) return n + (functions.count(h->name) ? 1 : 0);
      // Non-variable head (e.g. a let-bound partial application is a Var, so
      // this is only reached for inline lambdas).
      return n;
    }
    default: {
      int n = 0;
      for (auto& k : t->kids) n += call_count(k, functions);
      return n;
    }
  }
}

namespace {
bool atomic(const TermP& t) {
  return t->kind == Term::Kind::Var || t->kind == Term::Kind::Const;
}

bool anf_rec(const TermP& t, std::set<std::string>& binders) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return true;
    case Term::Kind::TyApp: return anf_rec(t->kids[0], binders);
    case Term::Kind::App: {
      const Term* h = t.get();
      while (h->kind == Term::Kind::App || h->kind == Term::Kind::TyApp) {
        if (h->kind == Term::Kind::App && !atomic(h->kids[1])) return false;
        h = h->kids[0].get();
      }
      return h->kind == Term::Kind::Var;
    }
    case Term::Kind::If:
      return atomic(t->kids[0]) && anf_rec(t->kids[1], binders) && anf_rec(t->kids[2], binders);
    case Term::Kind::Let:
      if (!binders.insert(t->name).second) return false;
      return anf_rec(t->kids[0], binders) && anf_rec(t->kids[1], binders);
    case Term::Kind::Lam:
      if (!binders.insert(t->name).second) return false;
      return anf_rec(t->kids[0], binders);
  }
  return false;
}

void term_names(const TermP& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var || t->kind == Term::Kind::Let || t->kind == Term::Kind::Lam)
    out.insert(t->name);
  for (auto& k : t->kids) term_names(k, out);
}

struct AnfBuilder {
  std::set<std::string> avoid;
  int counter = 0;
  std::string fresh() {
    for (;;) {
      std::string n = "t" + std::to_string(++counter);
      if (!avoid.count(n)) {
        avoid.insert(n);
        return n;
      }
    }
  }

  // Returns a spine/atom whose arguments are atoms, accumulating bindings.
  TermP flatten(const TermP& t, std::vector<std::pair<std::string, TermP>>& binds) {
    switch (t->kind) {
      case Term::Kind::Var:
      case Term::Kind::Const: return t;
      case Term::Kind::TyApp: return e_tyapp(flatten(t->kids[0], binds), t->tyArg);
      case Term::Kind::App: {
        TermP f = flatten(t->kids[0], binds);
        TermP a = atom(t->kids[1], binds);
        return e_app(f, a);
      }
      case Term::Kind::If: {
        TermP c = atom(t->kids[0], binds);
        return e_if(c, full(t->kids[1]), full(t->kids[2]));
      }
      case Term::Kind::Let: {
        TermP b = flatten(t->kids[0], binds);
        binds.push_back({t->name, b});
        return flatten(t->kids[1], binds);
      }
      case Term::Kind::Lam: return e_lam(t->name, t->argType, full(t->kids[0]));
    }
    return t;
  }

  TermP atom(const TermP& t, std::vector<std::pair<std::string, TermP>>& binds) {
    if (atomic(t)) return t;
    TermP v = flatten(t, binds);
    if (atomic(v)) return v;
    std::string n = fresh();
    binds.push_back({n, v});
    return e_var(n);
  }

  TermP full(const TermP& t) {
    std::vector<std::pair<std::string, TermP>> binds;
    TermP body = flatten(t, binds);
    for (auto it = binds.rbegin(); it != binds.rend(); ++it) body = e_let(it->first, it->second, body);
    return body;
  }
};

TermP subst_term(const TermP& t, const std::string& x, const TermP& r) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == x ? r : t;
    case Term::Kind::Const: return t;
    case Term::Kind::Let: {
      TermP b = subst_term(t->kids[0], x, r);
      if (t->name == x) return e_let(t->name, b, t->kids[1]);
      return e_let(t->name, b, subst_term(t->kids[1], x, r));
    }
    case Term::Kind::Lam:
      if (t->name == x) return t;
      return e_lam(t->name, t->argType, subst_term(t->kids[0], x, r));
    default: {
      Term c = *t;
      for (auto& k : c.kids) k = subst_term(k, x, r);
      return std::make_shared<const Term>(std::move(c));
    }
  }
}
}  // namespace

bool anf_valid(const TermP& t) {
  std::set<std::string> binders;
  return anf_rec(t, binders);
}

TermP to_anf(const TermP& t) {
  AnfBuilder b;
  term_names(t, b.avoid);
  if (t->kind == Term::Kind::Lam) {
    // Keep the lambda prefix, normalize the body.
    std::vector<std::pair<std::string, RTypeP>> params;
    TermP cur = t;
    while (cur->kind == Term::Kind::Lam) {
      params.push_back({cur->name, cur->argType});
      cur = cur->kids[0];
    }
    TermP body = b.full(cur);
    for (auto it = params.rbegin(); it != params.rend(); ++it) body = e_lam(it->first, it->second, body);
    return body;
  }
  return b.full(t);
}

TermP inline_lets(const TermP& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return t;
    case Term::Kind::Let:
      return subst_term(inline_lets(t->kids[1]), t->name, inline_lets(t->kids[0]));
    default: {
      Term c = *t;
      for (auto& k : c.kids) k = inline_lets(k);
      return std::make_shared<const Term>(std::move(c));
    }
  }
}

TermP canonical_binders(const TermP& t) {
  int n = 0;
  std::function<TermP(const TermP&)> go = [&](const TermP& x) -> TermP {
    switch (x->kind) {
      case Term::Kind::Var:
      case Term::Kind::Const: return x;
      case Term::Kind::Let: {
        TermP b = go(x->kids[0]);
        std::string nn = "_b" + std::to_string(++n);
        TermP body = go(subst_term(x->kids[1], x->name, e_var(nn)));
        return e_let(nn, b, body);
      }
      case Term::Kind::Lam: {
        std::string nn = "_b" + std::to_string(++n);
        return e_lam(nn, x->argType, go(subst_term(x->kids[0], x->name, e_var(nn))));
      }
      default: {
        Term c = *x;
        for (auto& k : c.kids) k = go(k);
        return std::make_shared<const Term>(std::move(c));
      }
    }
  };
  return go(t);
}

// ---------------------------------------------------------------- library

const RTypeP* Library::lookup(const std::string& name) const {
  for (auto& [n, t] : components)
    if (n == name) return &t;
  return nullptr;
}

const PredDecl* Library::predicate(const std::string& name) const {
  for (auto& p : predicates)
    if (p.name == name) return &p;
  return nullptr;
}

std::map<std::string, RTypeP> Library::type_context() const {
  std::map<std::string, RTypeP> m;
  for (auto& [n, t] : components) m[n] = t;
  return m;
}

RTypeP Query::as_type() const {
  RTypeP t = result;
  for (auto it = args.rbegin(); it != args.rend(); ++it) t = t_arrow(it->first, it->second, t);
  return t;
}

}  // namespace hegel
