#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hegel {

// ---------------------------------------------------------------- base types

struct BaseType {
  enum class Kind { Int, Bool, Char, Unit, List, Pair, TyVar };
  Kind kind = Kind::Int;
  std::string name;            // TyVar only
  std::vector<BaseType> args;  // List: 1, Pair: 2

  static BaseType Int() { return {Kind::Int, {}, {}}; }
  static BaseType Bool() { return {Kind::Bool, {}, {}}; }
  static BaseType Char() { return {Kind::Char, {}, {}}; }
  static BaseType Unit() { return {Kind::Unit, {}, {}}; }
  static BaseType List(BaseType e) { return {Kind::List, {}, {std::move(e)}}; }
  static BaseType Pair(BaseType a, BaseType b) {
    return {Kind::Pair, {}, {std::move(a), std::move(b)}};
  }
  static BaseType Var(std::string n) { return {Kind::TyVar, std::move(n), {}}; }

  bool operator==(const BaseType& o) const {
    return kind == o.kind && name == o.name && args == o.args;
  }
  bool operator<(const BaseType& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (name != o.name) return name < o.name;
    return args < o.args;
  }
};

std::string to_string(const BaseType& t);
void collect_tyvars(const BaseType& t, std::set<std::string>& out);
BaseType subst_tyvars(const BaseType& t, const std::map<std::string, BaseType>& m);

// ---------------------------------------------------------------- qualifiers
//
// One node type covers both integer/term expressions and formulas. Which role
// a node plays is decided by its position.

struct Qual;
using QualP = std::shared_ptr<const Qual>;

struct Qual {
  enum class Kind {
    Var, IntLit, BoolLit, Nil, UnitLit, App,  // expressions
    Add, Sub, Mul, Neg,
    Eq, Ne, Lt, Le, Gt, Ge,                   // relational atoms
    Not, And, Or, Implies,
    Forall, Exists,
    KVar                                      // refinement variable
  };
  Kind kind;
  std::string name;  // Var, App, Forall/Exists binder, KVar
  std::int64_t ival = 0;
  bool bval = false;
  BaseType sort;     // Forall/Exists binder sort
  std::vector<QualP> kids;
};

QualP q_var(const std::string& n);
QualP q_int(std::int64_t v);
QualP q_bool(bool b);
QualP q_true();
QualP q_false();
QualP q_nil();
QualP q_unit();
QualP q_app(const std::string& f, std::vector<QualP> args);
QualP q_bin(Qual::Kind k, QualP a, QualP b);
QualP q_neg(QualP a);
QualP q_not(QualP a);
QualP q_and(std::vector<QualP> xs);   // flattens, drops True, folds False
QualP q_or(std::vector<QualP> xs);
QualP q_and2(QualP a, QualP b);
QualP q_implies(QualP a, QualP b);
QualP q_quant(Qual::Kind k, const std::string& v, BaseType s, QualP body);
QualP q_kvar(const std::string& n);

bool is_true(const QualP& q);
bool is_false(const QualP& q);
bool qual_equal(const QualP& a, const QualP& b);
bool is_relational(Qual::Kind k);
bool is_arith(Qual::Kind k);

// ---------------------------------------------------------------- types

struct RType;
using RTypeP = std::shared_ptr<const RType>;

struct PredSort {
  std::vector<BaseType> args;
  BaseType result;
  bool operator==(const PredSort& o) const { return args == o.args && result == o.result; }
};

struct RType {
  enum class Kind { Base, Arrow, ForallTy, ForallPred };
  Kind kind;
  // Base
  std::string var;
  BaseType base;
  QualP qual;
  // Arrow
  std::string argName;
  RTypeP argType, resType;
  // ForallTy / ForallPred
  std::string binder;
  PredSort predSort;
  RTypeP body;
};

RTypeP t_base(const std::string& v, BaseType b, QualP q);
RTypeP t_arrow(const std::string& x, RTypeP a, RTypeP r);
RTypeP t_forall_ty(const std::string& a, RTypeP body);
RTypeP t_forall_pred(const std::string& p, PredSort s, RTypeP body);

bool type_equal(const RTypeP& a, const RTypeP& b);
// Erased shape: arrows rendered structurally, refinements dropped.
std::string erased_key(const RTypeP& t);
int arity(const RTypeP& t);
void collect_type_tyvars(const RTypeP& t, std::set<std::string>& out);
RTypeP subst_type_tyvars(const RTypeP& t, const std::map<std::string, BaseType>& m);

// ---------------------------------------------------------------- terms

struct Literal {
  enum class Kind { Int, Bool, Nil, Unit };
  Kind kind = Kind::Int;
  std::int64_t value = 0;
  bool operator==(const Literal& o) const { return kind == o.kind && value == o.value; }
  bool operator<(const Literal& o) const {
    return kind != o.kind ? kind < o.kind : value < o.value;
  }
};
std::string to_string(const Literal& l);
QualP literal_qual(const Literal& l);

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Const, App, TyApp, If, Let, Lam };
  Kind kind;
  std::string name;   // Var, Let binder, Lam arg
  Literal lit;        // Const
  BaseType tyArg;     // TyApp
  RTypeP argType;     // Lam
  std::vector<TermP> kids;  // App: fn,arg  If: c,t,e  Let: bound,body  Lam: body  TyApp: term
};

TermP e_var(const std::string& n);
TermP e_const(Literal l);
TermP e_app(TermP f, TermP a);
TermP e_apps(TermP f, const std::vector<TermP>& args);
TermP e_tyapp(TermP t, BaseType b);
TermP e_if(TermP c, TermP t, TermP e);
TermP e_let(const std::string& x, TermP b, TermP body);
TermP e_lam(const std::string& x, RTypeP t, TermP body);

bool term_equal(const TermP& a, const TermP& b);
bool term_less(const TermP& a, const TermP& b);

// Number of maximal application spines whose head is one of `functions`.
int call_count(const TermP& t, const std::set<std::string>& functions);
// ANF: App arguments and If conditions are Var/Const, Let binders distinct.
bool anf_valid(const TermP& t);
// Converts nested applications into a Let chain with fresh binders t1, t2, ...
TermP to_anf(const TermP& t);
// Inlines single-use Let binders back into nested form (for display).
TermP inline_lets(const TermP& t);
// Renames Let/Lam binders to a canonical sequence; used for deduplication.
TermP canonical_binders(const TermP& t);

// ---------------------------------------------------------------- library

struct PredDecl {
  std::string name;
  PredSort sort;
};

struct ConstDecl {
  Literal lit;
  RTypeP type;
};

struct Library {
  std::vector<std::pair<std::string, RTypeP>> components;
  std::vector<PredDecl> predicates;
  std::vector<QualP> axioms;
  std::vector<ConstDecl> constants;

  const RTypeP* lookup(const std::string& name) const;
  const PredDecl* predicate(const std::string& name) const;
  std::map<std::string, RTypeP> type_context() const;
};

struct Query {
  std::string name = "goal";
  std::vector<std::pair<std::string, RTypeP>> args;
  RTypeP result;
  std::vector<PredDecl> predicates;
  std::vector<QualP> axioms;
  std::vector<ConstDecl> constants;
  RTypeP as_type() const;
};

// ---------------------------------------------------------------- errors

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& m)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + m),
        line(l), col(c) {}
};
struct DuplicateComponent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownPredicate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- parse/print

Library parse_library(const std::string& text);
Query parse_query(const std::string& text, const Library* context = nullptr);
RTypeP parse_type(const std::string& text, const Library* context = nullptr);
QualP parse_qual(const std::string& text, const Library* context = nullptr);
TermP parse_term(const std::string& text);

std::string pretty(const QualP& q);
std::string pretty(const RTypeP& t);
std::string pretty(const TermP& t);
std::string pretty(const Library& lib);
std::string pretty(const Query& q);

// ---------------------------------------------------------------- qualifier ops

using NameSubst = std::map<std::string, QualP>;

std::set<std::string> free_vars(const QualP& q);
// Capture-avoiding simultaneous substitution of free variables.
QualP qual_subst(const QualP& q, const NameSubst& sub);
QualP qual_rename(const QualP& q, const std::string& from, const std::string& to);
QualP qual_subst_tyvars(const QualP& q, const std::map<std::string, BaseType>& m);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);
std::set<std::string> type_free_vars(const RTypeP& t);
// Substitution over the free qualifier variables of a type; binders shadow.
RTypeP type_subst(const RTypeP& t, const NameSubst& sub);
// The refinement of a base type rewritten so that its value variable is `to`.
QualP base_qual_as(const RTypeP& base, const std::string& to);

}  // namespace hegel
