#include <sstream>

#include "hegel/syntax.hpp"

namespace hegel {

namespace {

int qual_level(const QualP& q) {
  switch (q->kind) {
    case Qual::Kind::Implies: return 0;
    case Qual::Kind::Or: return 1;
    case Qual::Kind::And: return 2;
    case Qual::Kind::Not: return 3;
    case Qual::Kind::Forall:
    case Qual::Kind::Exists: return 8;  // always parenthesized by itself
    case Qual::Kind::Eq:
    case Qual::Kind::Ne:
    case Qual::Kind::Lt:
    case Qual::Kind::Le:
    case Qual::Kind::Gt:
    case Qual::Kind::Ge: return 4;
    case Qual::Kind::Add:
    case Qual::Kind::Sub: return 5;
    case Qual::Kind::Mul: return 6;
    default: return 7;
  }
}

const char* rel_text(Qual::Kind k) {
  switch (k) {
    case Qual::Kind::Eq: return "=";
    case Qual::Kind::Ne: return "<>";
    case Qual::Kind::Lt: return "<";
    case Qual::Kind::Le: return "<=";
    case Qual::Kind::Gt: return ">";
    case Qual::Kind::Ge: return ">=";
    default: return "?";
  }
}

void pq(std::ostream& os, const QualP& q, int ctx);

void pq_paren(std::ostream& os, const QualP& q, int ctx) {
  if (qual_level(q) < ctx) {
    os << "(";
    pq(os, q, 0);
    os << ")";
  } else {
    pq(os, q, ctx);
  }
}

void pq(std::ostream& os, const QualP& q, int ctx) {
  (void)ctx;
  switch (q->kind) {
    case Qual::Kind::Var: os << q->name; break;
    case Qual::Kind::IntLit: os << q->ival; break;
    case Qual::Kind::BoolLit: os << (q->bval ? "true" : "false"); break;
    case Qual::Kind::Nil: os << "[]"; break;
    case Qual::Kind::UnitLit: os << "()"; break;
    case Qual::Kind::KVar: os << "$" << q->name; break;
    case Qual::Kind::App:
      os << q->name << "(";
      for (size_t i = 0; i < q->kids.size(); ++i) {
        if (i) os << ", ";
        pq(os, q->kids[i], 0);
      }
      os << ")";
      break;
    case Qual::Kind::Neg:
      os << "-(";
      pq(os, q->kids[0], 0);
      os << ")";
      break;
    case Qual::Kind::Add:
    case Qual::Kind::Sub:
      pq_paren(os, q->kids[0], 5);
      os << (q->kind == Qual::Kind::Add ? " + " : " - ");
      pq_paren(os, q->kids[1], 6);
      break;
    case Qual::Kind::Mul:
      pq_paren(os, q->kids[0], 6);
      os << " * ";
      pq_paren(os, q->kids[1], 7);
      break;
    case Qual::Kind::Eq:
    case Qual::Kind::Ne:
    case Qual::Kind::Lt:
    case Qual::Kind::Le:
    case Qual::Kind::Gt:
    case Qual::Kind::Ge:
      pq_paren(os, q->kids[0], 5);
      os << " " << rel_text(q->kind) << " ";
      pq_paren(os, q->kids[1], 5);
      break;
    case Qual::Kind::Not:
      os << "not ";
      pq_paren(os, q->kids[0], 3);
      break;
    case Qual::Kind::And:
    case Qual::Kind::Or:
      for (size_t i = 0; i < q->kids.size(); ++i) {
        if (i) os << (q->kind == Qual::Kind::And ? " /\\ " : " \\/ ");
        pq_paren(os, q->kids[i], q->kind == Qual::Kind::And ? 3 : 2);
      }
      break;
    case Qual::Kind::Implies:
      pq_paren(os, q->kids[0], 1);
      os << " => ";
      pq_paren(os, q->kids[1], 0);
      break;
    case Qual::Kind::Forall:
    case Qual::Kind::Exists:
      os << "(" << (q->kind == Qual::Kind::Forall ? "forall" : "exists") << " (" << q->name
         << " : " << to_string(q->sort) << "). ";
      pq(os, q->kids[0], 0);
      os << ")";
      break;
  }
}

std::string sort_text(const PredSort& s) {
  std::string out;
  for (size_t i = 0; i < s.args.size(); ++i) {
    if (i) out += " * ";
    out += to_string(s.args[i]);
  }
  return out + " -> " + to_string(s.result);
}

void pt(std::ostream& os, const RTypeP& t) {
  switch (t->kind) {
    case RType::Kind::Base:
      if (is_true(t->qual) && t->var == "v")
        os << to_string(t->base);
      else
        os << "{" << t->var << " : " << to_string(t->base) << " | " << pretty(t->qual) << "}";
      break;
    case RType::Kind::Arrow:
      os << "(" << t->argName << " : ";
      pt(os, t->argType);
      os << ") -> ";
      pt(os, t->resType);
      break;
    case RType::Kind::ForallTy:
      os << "forall " << t->binder << ". ";
      pt(os, t->body);
      break;
    case RType::Kind::ForallPred:
      os << "forall <" << t->binder << " : " << sort_text(t->predSort) << ">. ";
      pt(os, t->body);
      break;
  }
}

int term_level(const TermP& t) {
  switch (t->kind) {
    case Term::Kind::Lam:
    case Term::Kind::Let:
    case Term::Kind::If: return 0;
    case Term::Kind::App: return 1;
    default: return 2;
  }
}

void pe(std::ostream& os, const TermP& t);

void pe_at(std::ostream& os, const TermP& t, int lvl) {
  bool neg = t->kind == Term::Kind::Const && t->lit.kind == Literal::Kind::Int && t->lit.value < 0;
  if (term_level(t) < lvl || (neg && lvl >= 2)) {
    os << "(";
    pe(os, t);
    os << ")";
  } else {
    pe(os, t);
  }
}

void pe(std::ostream& os, const TermP& t) {
  switch (t->kind) {
    case Term::Kind::Var: os << t->name; break;
    case Term::Kind::Const: os << to_string(t->lit); break;
    case Term::Kind::App:
      pe_at(os, t->kids[0], 1);
      os << " ";
      pe_at(os, t->kids[1], 2);
      break;
    case Term::Kind::TyApp:
      pe_at(os, t->kids[0], 2);
      os << " @{" << to_string(t->tyArg) << "}";
      break;
    case Term::Kind::If:
      os << "if ";
      pe(os, t->kids[0]);
      os << " then ";
      pe(os, t->kids[1]);
      os << " else ";
      pe(os, t->kids[2]);
      break;
    case Term::Kind::Let:
      os << "let " << t->name << " = ";
      pe(os, t->kids[0]);
      os << " in ";
      pe(os, t->kids[1]);
      break;
    case Term::Kind::Lam: {
      os << "fun";
      TermP cur = t;
      while (cur->kind == Term::Kind::Lam) {
        os << " " << cur->name;
        cur = cur->kids[0];
      }
      os << " -> ";
      pe(os, cur);
      break;
    }
  }
}

}  // namespace

std::string pretty(const QualP& q) {
  std::ostringstream os;
  pq(os, q, 0);
  return os.str();
}

std::string pretty(const RTypeP& t) {
  std::ostringstream os;
  pt(os, t);
  return os.str();
}

std::string pretty(const TermP& t) {
  std::ostringstream os;
  pe(os, t);
  return os.str();
}

std::string pretty(const Library& lib) {
  std::ostringstream os;
  for (auto& p : lib.predicates) os << "pred " << p.name << " : " << sort_text(p.sort) << "\n";
  for (auto& a : lib.axioms) os << "axiom " << pretty(a) << "\n";
  for (auto& c : lib.constants) os << "const " << to_string(c.lit) << " : " << pretty(c.type) << "\n";
  for (auto& [n, t] : lib.components) os << n << " : " << pretty(t) << "\n";
  return os.str();
}

std::string pretty(const Query& q) {
  std::ostringstream os;
  for (auto& p : q.predicates) os << "pred " << p.name << " : " << sort_text(p.sort) << "\n";
  for (auto& a : q.axioms) os << "axiom " << pretty(a) << "\n";
  for (auto& c : q.constants) os << "const " << to_string(c.lit) << " : " << pretty(c.type) << "\n";
  os << q.name << " : " << pretty(q.as_type()) << "\n";
  return os.str();
}

}  // namespace hegel
