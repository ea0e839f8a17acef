#include <algorithm>

#include "hegel/syntax.hpp"

namespace hegel {

namespace {

void fv(const QualP& q, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (q->kind) {
    case Qual::Kind::Var:
      if (!bound.count(q->name)) out.insert(q->name);
      return;
    case Qual::Kind::Forall:
    case Qual::Kind::Exists: {
      bool added = bound.insert(q->name).second;
      fv(q->kids[0], bound, out);
      if (added) bound.erase(q->name);
      return;
    }
    default:
      for (auto& k : q->kids) fv(k, bound, out);
  }
}

QualP rebuild(const QualP& q, std::vector<QualP> kids) {
  Qual c = *q;
  c.kids = std::move(kids);
  return std::make_shared<const Qual>(std::move(c));
}

}  // namespace

std::set<std::string> free_vars(const QualP& q) {
  std::set<std::string> bound, out;
  fv(q, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

QualP qual_subst(const QualP& q, const NameSubst& sub) {
  if (sub.empty()) return q;
  switch (q->kind) {
    case Qual::Kind::Var: {
      auto it = sub.find(q->name);
      return it == sub.end() ? q : it->second;
    }
    case Qual::Kind::Forall:
    case Qual::Kind::Exists: {
      NameSubst inner = sub;
      inner.erase(q->name);
      if (inner.empty()) return q;
      std::set<std::string> body_fv = free_vars(q->kids[0]);
      std::set<std::string> repl_fv;
      bool relevant = false;
      for (auto& [k, v] : inner) {
        if (!body_fv.count(k)) continue;
        relevant = true;
        auto f = free_vars(v);
        repl_fv.insert(f.begin(), f.end());
      }
      if (!relevant) return q;
      std::string binder = q->name;
      QualP body = q->kids[0];
      if (repl_fv.count(binder)) {
        std::set<std::string> avoid = repl_fv;
        avoid.insert(body_fv.begin(), body_fv.end());
        for (auto& [k, v] : inner) avoid.insert(k);
        std::string nb = fresh_name(binder, avoid);
        body = qual_subst(body, {{binder, q_var(nb)}});
        binder = nb;
      }
      return q_quant(q->kind, binder, q->sort, qual_subst(body, inner));
    }
    default: {
      if (q->kids.empty()) return q;
      std::vector<QualP> kids;
      kids.reserve(q->kids.size());
      bool changed = false;
      for (auto& k : q->kids) {
        kids.push_back(qual_subst(k, sub));
        changed |= kids.back() != k;
      }
      return changed ? rebuild(q, std::move(kids)) : q;
    }
  }
}

QualP qual_rename(const QualP& q, const std::string& from, const std::string& to) {
  if (from == to) return q;
  return qual_subst(q, {{from, q_var(to)}});
}

QualP qual_subst_tyvars(const QualP& q, const std::map<std::string, BaseType>& m) {
  if (m.empty()) return q;
  if (q->kind == Qual::Kind::Forall || q->kind == Qual::Kind::Exists) {
    Qual c = *q;
    c.sort = subst_tyvars(q->sort, m);
    c.kids = {qual_subst_tyvars(q->kids[0], m)};
    return std::make_shared<const Qual>(std::move(c));
  }
  if (q->kids.empty()) return q;
  std::vector<QualP> kids;
  for (auto& k : q->kids) kids.push_back(qual_subst_tyvars(k, m));
  return rebuild(q, std::move(kids));
}

std::set<std::string> type_free_vars(const RTypeP& t) {
  std::set<std::string> out;
  switch (t->kind) {
    case RType::Kind::Base: {
      out = free_vars(t->qual);
      out.erase(t->var);
      break;
    }
    case RType::Kind::Arrow: {
      out = type_free_vars(t->argType);
      auto r = type_free_vars(t->resType);
      r.erase(t->argName);
      out.insert(r.begin(), r.end());
      break;
    }
    case RType::Kind::ForallTy:
    case RType::Kind::ForallPred: out = type_free_vars(t->body); break;
  }
  return out;
}

namespace {
std::set<std::string> repl_vars(const NameSubst& sub) {
  std::set<std::string> s;
  for (auto& [k, v] : sub) {
    s.insert(k);
    auto f = free_vars(v);
    s.insert(f.begin(), f.end());
  }
  return s;
}
}  // namespace

RTypeP type_subst(const RTypeP& t, const NameSubst& sub) {
  if (sub.empty()) return t;
  switch (t->kind) {
    case RType::Kind::Base: {
      NameSubst inner = sub;
      inner.erase(t->var);
      if (inner.empty()) return t;
      std::string v = t->var;
      QualP q = t->qual;
      auto avoid = repl_vars(inner);
      if (avoid.count(v)) {
        auto f = free_vars(q);
        avoid.insert(f.begin(), f.end());
        std::string nv = fresh_name(v, avoid);
        q = qual_rename(q, v, nv);
        v = nv;
      }
      return t_base(v, t->base, qual_subst(q, inner));
    }
    case RType::Kind::Arrow: {
      RTypeP a = type_subst(t->argType, sub);
      NameSubst inner = sub;
      inner.erase(t->argName);
      std::string x = t->argName;
      RTypeP r = t->resType;
      auto avoid = repl_vars(inner);
      if (!inner.empty() && avoid.count(x)) {
        auto f = type_free_vars(r);
        avoid.insert(f.begin(), f.end());
        std::string nx = fresh_name(x, avoid);
        r = type_subst(r, {{x, q_var(nx)}});
        x = nx;
      }
      return t_arrow(x, a, type_subst(r, inner));
    }
    case RType::Kind::ForallTy: return t_forall_ty(t->binder, type_subst(t->body, sub));
    case RType::Kind::ForallPred:
      return t_forall_pred(t->binder, t->predSort, type_subst(t->body, sub));
  }
  return t;
}

QualP base_qual_as(const RTypeP& base, const std::string& to) {
  return qual_rename(base->qual, base->var, to);
}

}  // namespace hegel
