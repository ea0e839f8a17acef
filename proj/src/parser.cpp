#include <cctype>
#include <functional>
#include <sstream>

#include "hegel/syntax.hpp"

namespace hegel {

namespace {

struct Token {
  enum class Kind { Ident, Int, Sym, End } kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& src, int line) {
  static const char* syms[] = {"/\\", "\\/", "=>", "->", "<>", "<=", ">=", "==", "!=", "@{",
                               "(",   ")",   "[",  "]",  "{",  "}",  ",",  ":",  "|",  "*",
                               "+",   "-",   "<",  ">",  "=",  ".",  "$"};
  std::vector<Token> out;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') break;  // comment
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      out.push_back({Token::Kind::Ident, src.substr(i, j - i), line, col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::Int, src.substr(i, j - i), line, col});
      i = j;
      continue;
    }
    bool matched = false;
    for (const char* s : syms) {
      size_t n = std::char_traits<char>::length(s);
      if (src.compare(i, n, s) == 0) {
        out.push_back({Token::Kind::Sym, s, line, col});
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::End, "", line, static_cast<int>(src.size()) + 1});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"forall", "exists", "not",  "true", "false", "fun",
                                          "let",    "in",     "if",   "then", "else",  "pred",
                                          "axiom",  "const"};
  return k;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  // Known predicates with arities; null means "accept any application".
  const std::map<std::string, int>* preds = nullptr;
  std::set<std::string>* usedPreds = nullptr;
  std::function<std::string()> freshArg;

  const Token& peek(size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  bool is_sym(const char* s, size_t k = 0) const {
    return peek(k).kind == Token::Kind::Sym && peek(k).text == s;
  }
  bool is_kw(const char* s, size_t k = 0) const {
    return peek(k).kind == Token::Kind::Ident && peek(k).text == s;
  }
  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError(peek().line, peek().col, m + " near '" + peek().text + "'");
  }
  void expect(const char* s) {
    if (!is_sym(s) && !is_kw(s)) fail(std::string("expected '") + s + "'");
    ++pos;
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident || keywords().count(peek().text)) fail("expected identifier");
    return toks[pos++].text;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  // ------------------------------------------------------------ base types
  struct BaseResult {
    BaseType base;
    bool nat = false;
    std::vector<std::pair<std::string, int>> pairNames;  // component names
  };

  BaseResult base_type() {
    BaseResult r;
    if (is_sym("[")) {
      ++pos;
      BaseResult e = base_type();
      if (e.nat) fail("nat is only allowed at the top of a refinement");
      expect("]");
      r.base = BaseType::List(e.base);
      return r;
    }
    if (is_sym("(")) {
      ++pos;
      std::string n1, n2;
      if (peek().kind == Token::Kind::Ident && is_sym(":", 1)) {
        n1 = ident();
        ++pos;
      }
      BaseResult a = base_type();
      if (is_sym(")")) {
        ++pos;
        return a;
      }
      expect(",");
      if (peek().kind == Token::Kind::Ident && is_sym(":", 1)) {
        n2 = ident();
        ++pos;
      }
      BaseResult b = base_type();
      expect(")");
      if (a.nat || b.nat) fail("nat is only allowed at the top of a refinement");
      r.base = BaseType::Pair(a.base, b.base);
      if (!n1.empty()) r.pairNames.push_back({n1, 1});
      if (!n2.empty()) r.pairNames.push_back({n2, 2});
      return r;
    }
    std::string n = ident();
    if (n == "int") r.base = BaseType::Int();
    else if (n == "bool") r.base = BaseType::Bool();
    else if (n == "char") r.base = BaseType::Char();
    else if (n == "unit") r.base = BaseType::Unit();
    else if (n == "nat") {
      r.base = BaseType::Int();
      r.nat = true;
    } else
      r.base = BaseType::Var(n);
    return r;
  }

  static QualP pair_sugar(QualP q, const std::string& v, const BaseResult& br) {
    NameSubst s;
    for (auto& [n, idx] : br.pairNames) s[n] = q_app(idx == 1 ? "fst" : "snd", {q_var(v)});
    return qual_subst(q, s);
  }

  RTypeP finish_base(const std::string& v, const BaseResult& br, QualP q) {
    if (!br.pairNames.empty()) {
      if (usedPreds) {
        for (auto& [n, idx] : br.pairNames) usedPreds->insert(idx == 1 ? "fst" : "snd");
      }
      q = pair_sugar(q, v, br);
    }
    if (br.nat) q = q_and2(q_bin(Qual::Kind::Ge, q_var(v), q_int(0)), q);
    return t_base(v, br.base, q);
  }

  // ------------------------------------------------------------ types
  RTypeP type() {
    if (is_kw("forall")) {
      ++pos;
      if (is_sym("<")) {
        ++pos;
        std::string p = ident();
        expect(":");
        PredSort s = pred_sort();
        expect(">");
        expect(".");
        return t_forall_pred(p, s, type());
      }
      std::string a = ident();
      expect(".");
      return t_forall_ty(a, type());
    }
    std::string binder;
    RTypeP arg = atype(binder);
    if (is_sym("->")) {
      ++pos;
      RTypeP res = type();
      if (binder.empty()) binder = freshArg ? freshArg() : "_x";
      return t_arrow(binder, normalize_arg(binder, arg), res);
    }
    if (!binder.empty()) fail("named binder must be followed by '->'");
    return arg;
  }

  // In `(x : {v : t | phi})` occurrences of x in phi denote the value.
  static RTypeP normalize_arg(const std::string& x, const RTypeP& t) {
    if (t->kind != RType::Kind::Base || x == t->var) return t;
    if (!free_vars(t->qual).count(x)) return t;
    return t_base(t->var, t->base, qual_rename(t->qual, x, t->var));
  }

  RTypeP atype(std::string& binder) {
    if (is_sym("{")) {
      ++pos;
      std::string v = ident();
      expect(":");
      BaseResult br = base_type();
      expect("|");
      QualP q = formula();
      expect("}");
      return finish_base(v, br, q);
    }
    if (is_sym("(")) {
      // (x : T) binder, (f : B, s : B) named pair, (B, B) pair or (T).
      if (peek(1).kind == Token::Kind::Ident && is_sym(":", 2)) {
        size_t save = pos;
        ++pos;
        std::string x = ident();
        ++pos;
        RTypeP t = type();
        if (is_sym(")")) {
          ++pos;
          binder = x;
          return t;
        }
        pos = save;
        BaseResult br = base_type();
        return finish_base("v", br, q_true());
      }
      size_t save = pos;
      ++pos;
      RTypeP t = type();
      if (is_sym(")")) {
        ++pos;
        return t;
      }
      pos = save;
      BaseResult br = base_type();
      return finish_base("v", br, q_true());
    }
    BaseResult br = base_type();
    return finish_base("v", br, q_true());
  }

  PredSort pred_sort() {
    PredSort s;
    for (;;) {
      BaseResult b = base_type();
      s.args.push_back(b.base);
      if (is_sym("*")) {
        ++pos;
        continue;
      }
      break;
    }
    expect("->");
    s.result = base_type().base;
    return s;
  }

  // ------------------------------------------------------------ formulas
  QualP formula() { return implication(); }

  QualP implication() {
    QualP a = disjunction();
    if (is_sym("=>")) {
      ++pos;
      QualP b = implication();
      return q_bin(Qual::Kind::Implies, a, b);
    }
    return a;
  }

  // Formula constructors that keep the parsed shape (no simplification) so
  // that printing and re-parsing is the identity.
  static QualP raw(Qual::Kind k, std::vector<QualP> kids) {
    Qual q{k, {}, 0, false, {}, std::move(kids)};
    return std::make_shared<const Qual>(std::move(q));
  }

  QualP disjunction() {
    std::vector<QualP> xs{conjunction()};
    while (is_sym("\\/")) {
      ++pos;
      xs.push_back(conjunction());
    }
    return xs.size() == 1 ? xs[0] : raw(Qual::Kind::Or, xs);
  }

  QualP conjunction() {
    std::vector<QualP> xs{unary()};
    while (is_sym("/\\")) {
      ++pos;
      xs.push_back(unary());
    }
    return xs.size() == 1 ? xs[0] : raw(Qual::Kind::And, xs);
  }

  QualP unary() {
    if (is_kw("not")) {
      ++pos;
      return raw(Qual::Kind::Not, {unary()});
    }
    if (is_kw("forall") || is_kw("exists")) {
      Qual::Kind k = is_kw("forall") ? Qual::Kind::Forall : Qual::Kind::Exists;
      ++pos;
      expect("(");
      std::string x = ident();
      expect(":");
      BaseResult b = base_type();
      expect(")");
      expect(".");
      QualP body = formula();
      if (b.nat) body = q_bin(Qual::Kind::Implies, q_bin(Qual::Kind::Ge, q_var(x), q_int(0)), body);
      return q_quant(k, x, b.base, body);
    }
    if (is_sym("(")) {
      size_t save = pos;
      ++pos;
      try {
        QualP f = formula();
        if (is_sym(")")) {
          ++pos;
          if (!rel_or_arith_next()) return f;
        }
      } catch (const ParseError&) {
      }
      pos = save;
    }
    return relation();
  }

  bool rel_or_arith_next() const {
    static const char* ops[] = {"=", "==", "<>", "!=", "<", "<=", ">", ">=", "+", "-", "*"};
    for (const char* o : ops)
      if (is_sym(o)) return true;
    return false;
  }

  bool rel_op(Qual::Kind& k) const {
    if (is_sym("=") || is_sym("==")) k = Qual::Kind::Eq;
    else if (is_sym("<>") || is_sym("!=")) k = Qual::Kind::Ne;
    else if (is_sym("<=")) k = Qual::Kind::Le;
    else if (is_sym(">=")) k = Qual::Kind::Ge;
    else if (is_sym("<")) k = Qual::Kind::Lt;
    else if (is_sym(">")) k = Qual::Kind::Gt;
    else return false;
    return true;
  }

  QualP relation() {
    QualP lhs = expr();
    Qual::Kind k;
    std::vector<QualP> atoms;
    while (rel_op(k)) {
      ++pos;
      QualP rhs = expr();
      atoms.push_back(q_bin(k, lhs, rhs));
      lhs = rhs;
    }
    if (atoms.empty()) return lhs;
    return atoms.size() == 1 ? atoms[0] : raw(Qual::Kind::And, atoms);
  }

  QualP expr() {
    QualP a = term();
    while (is_sym("+") || is_sym("-")) {
      Qual::Kind k = is_sym("+") ? Qual::Kind::Add : Qual::Kind::Sub;
      ++pos;
      a = q_bin(k, a, term());
    }
    return a;
  }

  QualP term() {
    QualP a = factor();
    while (is_sym("*")) {
      ++pos;
      a = q_bin(Qual::Kind::Mul, a, factor());
    }
    return a;
  }

  bool starts_factor() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) return true;
    if (t.kind == Token::Kind::Ident)
      return !keywords().count(t.text) || t.text == "true" || t.text == "false";
    return is_sym("(") || is_sym("$") || is_sym("[");
  }

  QualP factor() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      ++pos;
      return q_int(std::stoll(t.text));
    }
    if (is_sym("-")) {
      ++pos;
      if (peek().kind == Token::Kind::Int) return q_int(-std::stoll(toks[pos++].text));
      return q_neg(factor());
    }
    if (is_sym("$")) {
      ++pos;
      return q_kvar(ident());
    }
    if (is_sym("[")) {
      ++pos;
      expect("]");
      return q_nil();
    }
    if (is_sym("(")) {
      ++pos;
      if (is_sym(")")) {
        ++pos;
        return q_unit();
      }
      QualP e = expr();
      expect(")");
      return e;
    }
    if (is_kw("true")) {
      ++pos;
      return q_true();
    }
    if (is_kw("false")) {
      ++pos;
      return q_false();
    }
    std::string n = ident();
    int ar = -1;
    if (preds) {
      auto it = preds->find(n);
      if (it != preds->end()) ar = it->second;
    }
    if (is_sym("(")) {
      if (preds && ar < 0) throw UnknownPredicate("unknown predicate '" + n + "'");
      ++pos;
      std::vector<QualP> args;
      if (!is_sym(")")) {
        args.push_back(expr());
        while (is_sym(",")) {
          ++pos;
          args.push_back(expr());
        }
      }
      expect(")");
      if (usedPreds) usedPreds->insert(n);
      return q_app(n, args);
    }
    if (ar > 0 && starts_factor()) {
      std::vector<QualP> args;
      for (int i = 0; i < ar && starts_factor(); ++i) args.push_back(factor());
      if (usedPreds) usedPreds->insert(n);
      return q_app(n, args);
    }
    if (preds && ar < 0 && starts_factor()) throw UnknownPredicate("unknown predicate '" + n + "'");
    return q_var(n);
  }

  // ------------------------------------------------------------ terms
  TermP texpr() {
    if (is_kw("fun")) {
      ++pos;
      std::vector<std::string> xs;
      while (!is_sym("->")) xs.push_back(ident());
      if (xs.empty()) fail("fun needs a parameter");
      ++pos;
      TermP body = texpr();
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = e_lam(*it, nullptr, body);
      return body;
    }
    if (is_kw("let")) {
      ++pos;
      std::string x = ident();
      expect("=");
      TermP b = texpr();
      expect("in");
      return e_let(x, b, texpr());
    }
    if (is_kw("if")) {
      ++pos;
      TermP c = texpr();
      expect("then");
      TermP a = texpr();
      expect("else");
      return e_if(c, a, texpr());
    }
    TermP f = taexpr();
    while (starts_taexpr()) f = e_app(f, taexpr());
    return f;
  }

  bool starts_taexpr() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) return true;
    if (t.kind == Token::Kind::Ident)
      return !keywords().count(t.text) || t.text == "true" || t.text == "false";
    return is_sym("(") || is_sym("[") || (is_sym("-") && peek(1).kind == Token::Kind::Int);
  }

  TermP taexpr() {
    TermP r;
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      ++pos;
      r = e_const({Literal::Kind::Int, std::stoll(t.text)});
    } else if (is_sym("-") && peek(1).kind == Token::Kind::Int) {
      ++pos;
      r = e_const({Literal::Kind::Int, -std::stoll(toks[pos++].text)});
    } else if (is_kw("true") || is_kw("false")) {
      r = e_const({Literal::Kind::Bool, is_kw("true") ? 1 : 0});
      ++pos;
    } else if (is_sym("[")) {
      ++pos;
      expect("]");
      r = e_const({Literal::Kind::Nil, 0});
    } else if (is_sym("(")) {
      ++pos;
      if (is_sym(")")) {
        ++pos;
        r = e_const({Literal::Kind::Unit, 0});
      } else {
        r = texpr();
        expect(")");
      }
    } else {
      r = e_var(ident());
    }
    while (is_sym("@{")) {
      ++pos;
      BaseResult b = base_type();
      expect("}");
      r = e_tyapp(r, b.base);
    }
    return r;
  }

  Literal literal() {
    if (peek().kind == Token::Kind::Int) return {Literal::Kind::Int, std::stoll(toks[pos++].text)};
    if (is_sym("-") && peek(1).kind == Token::Kind::Int) {
      ++pos;
      return {Literal::Kind::Int, -std::stoll(toks[pos++].text)};
    }
    if (is_kw("true") || is_kw("false")) {
      Literal l{Literal::Kind::Bool, is_kw("true") ? 1 : 0};
      ++pos;
      return l;
    }
    if (is_sym("[")) {
      ++pos;
      expect("]");
      return {Literal::Kind::Nil, 0};
    }
    if (is_sym("(")) {
      ++pos;
      expect(")");
      return {Literal::Kind::Unit, 0};
    }
    fail("expected literal");
  }
};

std::vector<std::pair<int, std::string>> split_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    out.push_back({n, line});
  }
  return out;
}

RTypeP literal_type(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Int:
      return t_base("v", BaseType::Int(), q_bin(Qual::Kind::Eq, q_var("v"), q_int(l.value)));
    case Literal::Kind::Bool:
      return t_base("v", BaseType::Bool(), l.value ? q_var("v") : q_not(q_var("v")));
    case Literal::Kind::Nil: return t_base("v", BaseType::List(BaseType::Var("a")), q_true());
    case Literal::Kind::Unit: return t_base("v", BaseType::Unit(), q_true());
  }
  return nullptr;
}

// Renames binders and type variables apart. A name is only changed when it
// clashes with an earlier one, so already-distinct libraries are unchanged.
struct Renamer {
  std::set<std::string> binders, tyvars;

  RTypeP binders_apart(const RTypeP& t) {
    switch (t->kind) {
      case RType::Kind::Arrow: {
        std::string x = t->argName;
        RTypeP res = t->resType;
        if (binders.count(x)) {
          std::set<std::string> avoid = binders;
          auto f = type_free_vars(res);
          avoid.insert(f.begin(), f.end());
          std::string nx = fresh_name(x, avoid);
          res = type_subst(res, {{x, q_var(nx)}});
          x = nx;
        }
        binders.insert(x);
        return t_arrow(x, binders_apart(t->argType), binders_apart(res));
      }
      case RType::Kind::ForallTy: return t_forall_ty(t->binder, binders_apart(t->body));
      case RType::Kind::ForallPred:
        return t_forall_pred(t->binder, t->predSort, binders_apart(t->body));
      default: return t;
    }
  }

  RTypeP tyvars_apart(const RTypeP& t) {
    std::set<std::string> tv;
    collect_type_tyvars(t, tv);
    std::map<std::string, BaseType> m;
    std::set<std::string> avoid = tyvars;
    avoid.insert(tv.begin(), tv.end());
    for (auto& a : tv) {
      if (tyvars.count(a)) {
        std::string na = fresh_name(a, avoid);
        avoid.insert(na);
        m[a] = BaseType::Var(na);
        tyvars.insert(na);
      } else {
        tyvars.insert(a);
      }
    }
    return subst_type_tyvars(t, m);
  }
};

void collect_type_names(const RTypeP& t, std::set<std::string>& out) {
  if (t->kind == RType::Kind::Arrow) {
    out.insert(t->argName);
    collect_type_names(t->argType, out);
    collect_type_names(t->resType, out);
  } else if (t->kind == RType::Kind::ForallTy || t->kind == RType::Kind::ForallPred) {
    collect_type_names(t->body, out);
  }
}

struct DeclReader {
  std::map<std::string, int> predArity;
  std::vector<PredDecl> preds;
  std::vector<QualP> axioms;
  std::vector<ConstDecl> consts;
  std::vector<std::pair<std::string, RTypeP>> sigs;
  std::vector<int> sigLines;
  int argCounter = 0;
  std::set<std::string> usedNames;
  bool lenient = false;  // queries without a library context

  void read(const std::string& text) {
    // Collect written binder names first so generated ones never clash.
    for (auto& [ln, line] : split_lines(text))
      for (auto& t : lex(line, ln))
        if (t.kind == Token::Kind::Ident) usedNames.insert(t.text);
    for (auto& [ln, line] : split_lines(text)) {
      Parser p;
      p.toks = lex(line, ln);
      if (p.at_end()) continue;
      p.preds = lenient ? nullptr : &predArity;
      p.freshArg = [this]() {
        for (;;) {
          std::string n = "_x" + std::to_string(++argCounter);
          if (!usedNames.count(n)) {
            usedNames.insert(n);
            return n;
          }
        }
      };
      std::set<std::string> used;
      p.usedPreds = &used;
      if (p.is_kw("pred")) {
        ++p.pos;
        std::string n = p.ident();
        p.expect(":");
        PredSort s = p.pred_sort();
        preds.push_back({n, s});
        predArity[n] = static_cast<int>(s.args.size());
      } else if (p.is_kw("axiom")) {
        ++p.pos;
        axioms.push_back(p.formula());
      } else if (p.is_kw("const")) {
        ++p.pos;
        Literal l = p.literal();
        RTypeP t = literal_type(l);
        if (p.is_sym(":")) {
          ++p.pos;
          t = p.type();
        }
        consts.push_back({l, t});
      } else {
        std::string n = p.ident();
        p.expect(":");
        RTypeP t = p.type();
        sigs.push_back({n, t});
        sigLines.push_back(ln);
      }
      if (!p.at_end()) p.fail("trailing input");
      if (!lenient)
        for (auto& u : used)
          if (!predArity.count(u)) throw UnknownPredicate("unknown predicate '" + u + "'");
    }
  }
};

}  // namespace

Library parse_library(const std::string& text) {
  DeclReader r;
  r.read(text);
  Library lib;
  lib.predicates = r.preds;
  lib.axioms = r.axioms;
  lib.constants = r.consts;
  std::set<std::string> names;
  Renamer ren;
  for (size_t i = 0; i < r.sigs.size(); ++i) {
    auto& [n, t] = r.sigs[i];
    if (!names.insert(n).second) throw DuplicateComponent("duplicate component '" + n + "'");
    RTypeP tt = ren.binders_apart(t);
    tt = ren.tyvars_apart(tt);
    lib.components.push_back({n, tt});
  }
  return lib;
}

Query parse_query(const std::string& text, const Library* context) {
  DeclReader r;
  if (context) {
    r.preds = context->predicates;
    for (auto& p : context->predicates) r.predArity[p.name] = static_cast<int>(p.sort.args.size());
  } else {
    r.lenient = true;
  }
  size_t inherited = r.preds.size();
  r.read(text);
  if (r.sigs.size() != 1) throw ParseError(1, 1, "query file must contain exactly one signature");
  Query q;
  q.name = r.sigs[0].first;
  q.predicates.assign(r.preds.begin() + static_cast<long>(inherited), r.preds.end());
  q.axioms = r.axioms;
  q.constants = r.consts;
  RTypeP t = r.sigs[0].second;
  while (t->kind == RType::Kind::Arrow) {
    q.args.push_back({t->argName, t->argType});
    t = t->resType;
  }
  if (t->kind != RType::Kind::Base) throw ParseError(r.sigLines[0], 1, "query result must be a base refinement");
  q.result = t;
  std::set<std::string> seen;
  for (auto& [n, _] : q.args)
    if (!seen.insert(n).second) throw ParseError(r.sigLines[0], 1, "duplicate query argument " + n);
  return q;
}

namespace {
Parser make_parser(const std::string& text, const Library* context, std::map<std::string, int>& arity) {
  Parser p;
  p.toks = lex(text, 1);
  if (context) {
    for (auto& d : context->predicates) arity[d.name] = static_cast<int>(d.sort.args.size());
    p.preds = &arity;
  }
  auto counter = std::make_shared<int>(0);
  p.freshArg = [counter]() { return "_x" + std::to_string(++*counter); };
  return p;
}
}  // namespace

RTypeP parse_type(const std::string& text, const Library* context) {
  std::map<std::string, int> arity;
  Parser p = make_parser(text, context, arity);
  RTypeP t = p.type();
  if (!p.at_end()) p.fail("trailing input");
  return t;
}

QualP parse_qual(const std::string& text, const Library* context) {
  std::map<std::string, int> arity;
  Parser p = make_parser(text, context, arity);
  QualP q = p.formula();
  if (!p.at_end()) p.fail("trailing input");
  return q;
}

TermP parse_term(const std::string& text) {
  std::map<std::string, int> arity;
  Parser p = make_parser(text, nullptr, arity);
  TermP t = p.texpr();
  if (!p.at_end()) p.fail("trailing input");
  return t;
}

}  // namespace hegel
