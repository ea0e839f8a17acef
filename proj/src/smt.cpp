#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <optional>
#include <sstream>

#include "hegel/entail.hpp"
#include "smt_internal.hpp"

namespace hegel {

// ---------------------------------------------------------------- encoder

namespace {

bool unify_sort(const BaseType& pat, const BaseType& actual, std::map<std::string, BaseType>& sub) {
  if (pat.kind == BaseType::Kind::TyVar) {
    auto it = sub.find(pat.name);
    if (it != sub.end()) return it->second == actual;
    sub[pat.name] = actual;
    return true;
  }
  if (pat.kind != actual.kind || pat.args.size() != actual.args.size()) return false;
  for (size_t i = 0; i < pat.args.size(); ++i)
    if (!unify_sort(pat.args[i], actual.args[i], sub)) return false;
  return true;
}

std::string quote(const std::string& s) { return "|" + s + "|"; }

std::string sort_text(const BaseType& b) {
  switch (b.kind) {
    case BaseType::Kind::Int: return "Int";
    case BaseType::Kind::Bool: return "Bool";
    case BaseType::Kind::Char: return "Char";
    case BaseType::Kind::Unit: return "Unit";
    case BaseType::Kind::TyVar: return "'" + b.name;
    case BaseType::Kind::List: return "List<" + sort_text(b.args[0]) + ">";
    case BaseType::Kind::Pair:
      return "Pair<" + sort_text(b.args[0]) + "," + sort_text(b.args[1]) + ">";
  }
  return "?";
}

struct Encoder {
  const std::vector<PredDecl>& preds;
  std::vector<std::pair<std::string, BaseType>> scope;  // innermost last
  std::map<std::string, BaseType> freeSorts;            // free names seen
  const std::map<std::string, BaseType>& declared;      // known free names
  std::set<BaseType> sorts;                             // every sort mentioned
  std::map<std::string, std::string> funs;              // mangled name -> decl

  Encoder(const std::vector<PredDecl>& p, const std::map<std::string, BaseType>& d)
      : preds(p), declared(d) {}

  std::string sort(const BaseType& b) {
    sorts.insert(b);
    for (auto& a : b.args) sort(a);
    if (b.kind == BaseType::Kind::Int || b.kind == BaseType::Kind::Bool) return sort_text(b);
    return quote(sort_text(b));
  }

  const PredDecl* pred(const std::string& n) const {
    for (auto& p : preds)
      if (p.name == n) return &p;
    return nullptr;
  }

  std::optional<BaseType> lookup(const std::string& n) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == n) return it->second;
    auto d = declared.find(n);
    if (d != declared.end()) return d->second;
    auto f = freeSorts.find(n);
    if (f != freeSorts.end()) return f->second;
    return std::nullopt;
  }

  bool bound(const std::string& n) const {
    for (auto& [x, _] : scope)
      if (x == n) return true;
    return false;
  }

  // Sort of an expression when it can be determined without a hint.
  std::optional<BaseType> infer(const QualP& q) {
    switch (q->kind) {
      case Qual::Kind::Var: return lookup(q->name);
      case Qual::Kind::IntLit:
      case Qual::Kind::Add:
      case Qual::Kind::Sub:
      case Qual::Kind::Mul:
      case Qual::Kind::Neg: return BaseType::Int();
      case Qual::Kind::BoolLit: return BaseType::Bool();
      case Qual::Kind::UnitLit: return BaseType::Unit();
      case Qual::Kind::Nil: return std::nullopt;
      case Qual::Kind::App: {
        const PredDecl* p = pred(q->name);
        if (!p) return std::nullopt;
        std::map<std::string, BaseType> sub;
        for (size_t i = 0; i < q->kids.size() && i < p->sort.args.size(); ++i) {
          auto s = infer(q->kids[i]);
          if (s) unify_sort(p->sort.args[i], *s, sub);
        }
        return subst_tyvars(p->sort.result, sub);
      }
      case Qual::Kind::KVar: throw UnsupportedConstruct("refinement variable $" + q->name);
      default: return BaseType::Bool();
    }
  }

  std::string app(const QualP& q, const std::optional<BaseType>& hint) {
    const PredDecl* p = pred(q->name);
    std::vector<BaseType> argSorts;
    std::vector<std::string> args;
    BaseType result;
    if (p) {
      if (p->sort.args.size() != q->kids.size())
        throw UnsupportedConstruct("arity mismatch for " + q->name);
      std::map<std::string, BaseType> sub;
      std::vector<std::optional<BaseType>> known;
      for (size_t i = 0; i < q->kids.size(); ++i) {
        known.push_back(infer(q->kids[i]));
        if (known.back()) unify_sort(p->sort.args[i], *known.back(), sub);
      }
      if (hint) unify_sort(p->sort.result, *hint, sub);
      for (size_t i = 0; i < q->kids.size(); ++i) {
        BaseType s = subst_tyvars(p->sort.args[i], sub);
        argSorts.push_back(s);
        args.push_back(emit(q->kids[i], s));
      }
      result = subst_tyvars(p->sort.result, sub);
    } else {
      // Undeclared symbols (predicate variables) stay uninterpreted.
      for (auto& k : q->kids) {
        auto s = infer(k);
        if (!s) throw UnsupportedConstruct("cannot infer argument sort for " + q->name);
        argSorts.push_back(*s);
        args.push_back(emit(k, *s));
      }
      result = hint ? *hint : BaseType::Bool();
    }
    std::string name = q->name + "<";
    for (size_t i = 0; i < argSorts.size(); ++i) name += (i ? "," : "") + sort_text(argSorts[i]);
    name += ">" + sort_text(result);
    std::string decl = "(declare-fun " + quote("f:" + name) + " (";
    for (size_t i = 0; i < argSorts.size(); ++i) decl += (i ? " " : "") + sort(argSorts[i]);
    decl += ") " + sort(result) + ")";
    funs[name] = decl;
    if (args.empty()) return quote("f:" + name);
    std::string out = "(" + quote("f:" + name);
    for (auto& a : args) out += " " + a;
    return out + ")";
  }

  std::string nary(const char* op, const QualP& q, const std::optional<BaseType>& hint) {
    std::string out = std::string("(") + op;
    for (auto& k : q->kids) out += " " + emit(k, hint);
    return out + ")";
  }

  std::string emit(const QualP& q, const std::optional<BaseType>& hint) {
    switch (q->kind) {
      case Qual::Kind::Var: {
        auto s = lookup(q->name);
        if (!s) {
          BaseType g = hint ? *hint : BaseType::Int();
          freeSorts[q->name] = g;
          s = g;
        } else if (!bound(q->name) && !declared.count(q->name)) {
          freeSorts[q->name] = *s;
        }
        sort(*s);
        return quote(q->name);
      }
      case Qual::Kind::IntLit:
        return q->ival < 0 ? "(- " + std::to_string(-q->ival) + ")" : std::to_string(q->ival);
      case Qual::Kind::BoolLit: return q->bval ? "true" : "false";
      case Qual::Kind::Nil: {
        if (!hint) throw UnsupportedConstruct("cannot infer sort of []");
        std::string n = "nil<" + sort_text(*hint) + ">";
        funs[n] = "(declare-fun " + quote(n) + " () " + sort(*hint) + ")";
        return quote(n);
      }
      case Qual::Kind::UnitLit:
        funs["unit"] = "(declare-fun |unit| () " + sort(BaseType::Unit()) + ")";
        return "|unit|";
      case Qual::Kind::App: return app(q, hint);
      case Qual::Kind::Add: return nary("+", q, BaseType::Int());
      case Qual::Kind::Sub: return nary("-", q, BaseType::Int());
      case Qual::Kind::Mul: return nary("*", q, BaseType::Int());
      case Qual::Kind::Neg: return nary("-", q, BaseType::Int());
      case Qual::Kind::Eq:
      case Qual::Kind::Ne: {
        auto s = infer(q->kids[0]);
        if (!s) s = infer(q->kids[1]);
        if (!s) s = BaseType::Int();
        std::string e = "(= " + emit(q->kids[0], s) + " " + emit(q->kids[1], s) + ")";
        return q->kind == Qual::Kind::Eq ? e : "(not " + e + ")";
      }
      case Qual::Kind::Lt: return nary("<", q, BaseType::Int());
      case Qual::Kind::Le: return nary("<=", q, BaseType::Int());
      case Qual::Kind::Gt: return nary(">", q, BaseType::Int());
      case Qual::Kind::Ge: return nary(">=", q, BaseType::Int());
      case Qual::Kind::Not: return "(not " + emit(q->kids[0], BaseType::Bool()) + ")";
      case Qual::Kind::And:
        if (q->kids.empty()) return "true";
        return nary("and", q, BaseType::Bool());
      case Qual::Kind::Or:
        if (q->kids.empty()) return "false";
        return nary("or", q, BaseType::Bool());
      case Qual::Kind::Implies: return nary("=>", q, BaseType::Bool());
      case Qual::Kind::Forall:
      case Qual::Kind::Exists: {
        std::string s = sort(q->sort);
        scope.push_back({q->name, q->sort});
        std::string body = emit(q->kids[0], BaseType::Bool());
        scope.pop_back();
        return std::string("(") + (q->kind == Qual::Kind::Forall ? "forall" : "exists") + " ((" +
               quote(q->name) + " " + s + ")) " + body + ")";
      }
      case Qual::Kind::KVar: throw UnsupportedConstruct("refinement variable $" + q->name);
    }
    return "?";
  }
};

void collect_binder_tyvars(const QualP& q, std::set<std::string>& out) {
  if (q->kind == Qual::Kind::Forall || q->kind == Qual::Kind::Exists) collect_tyvars(q->sort, out);
  for (auto& k : q->kids) collect_binder_tyvars(k, out);
}

// Instances of an axiom whose binder sorts mention type variables, one per
// assignment of those variables to sorts already present in the query.
std::vector<QualP> axiom_instances(const QualP& ax, const std::set<BaseType>& used) {
  std::set<std::string> tvs;
  collect_binder_tyvars(ax, tvs);
  if (tvs.empty()) return {ax};
  std::vector<BaseType> binderSorts;
  std::function<void(const QualP&)> walk = [&](const QualP& q) {
    if (q->kind == Qual::Kind::Forall || q->kind == Qual::Kind::Exists) binderSorts.push_back(q->sort);
    for (auto& k : q->kids) walk(k);
  };
  walk(ax);
  std::map<std::string, std::set<BaseType>> cands;
  for (auto& bs : binderSorts)
    for (auto& u : used) {
      std::map<std::string, BaseType> sub;
      if (unify_sort(bs, u, sub))
        for (auto& [k, v] : sub) cands[k].insert(v);
    }
  std::vector<std::map<std::string, BaseType>> subs = {{}};
  for (auto& tv : tvs) {
    if (!cands.count(tv)) return {};
    std::vector<std::map<std::string, BaseType>> next;
    for (auto& s : subs)
      for (auto& c : cands[tv]) {
        auto n = s;
        n[tv] = c;
        next.push_back(n);
        if (next.size() > 16) break;
      }
    subs = std::move(next);
  }
  std::vector<QualP> out;
  for (auto& s : subs) out.push_back(qual_subst_tyvars(ax, s));
  return out;
}

}  // namespace

std::string encode_body(const EntailmentQuery& q, const std::vector<PredDecl>& preds,
                        const std::vector<QualP>& axioms) {
  Context ctx = slice_context(q);
  std::map<std::string, BaseType> declared;
  for (auto& [n, t] : ctx)
    if (t->kind == RType::Kind::Base) declared[n] = t->base;
  declared[q.valueVar] = q.valueSort;

  Encoder enc(preds, declared);
  QualP ant = qual_subst(q.antecedent, q.subst);
  QualP cons = qual_subst(q.consequent, q.subst);
  std::vector<std::string> asserts;
  QualP gamma = interpret_context(ctx, q.props);
  if (!is_true(gamma)) asserts.push_back(enc.emit(gamma, BaseType::Bool()));
  if (!is_true(ant)) asserts.push_back(enc.emit(ant, BaseType::Bool()));
  asserts.push_back("(not " + enc.emit(cons, BaseType::Bool()) + ")");
  for (auto& [n, s] : declared) enc.sort(s);

  std::vector<std::string> axiomAsserts;
  std::set<std::string> seenAx;
  std::set<BaseType> used = enc.sorts;
  for (auto& ax : axioms)
    for (auto& inst : axiom_instances(ax, used)) {
      std::string a = enc.emit(inst, BaseType::Bool());
      if (seenAx.insert(a).second) axiomAsserts.push_back(a);
    }

  std::ostringstream os;
  std::set<std::string> sortDecls;
  for (auto& s : enc.sorts)
    if (s.kind != BaseType::Kind::Int && s.kind != BaseType::Kind::Bool)
      sortDecls.insert("(declare-sort " + quote(sort_text(s)) + " 0)");
  for (auto& d : sortDecls) os << d << "\n";
  for (auto& [n, d] : enc.funs) os << d << "\n";
  std::map<std::string, BaseType> consts = declared;
  for (auto& [n, s] : enc.freeSorts) consts.emplace(n, s);
  for (auto& [n, s] : consts) os << "(declare-const " << quote(n) << " " << enc.sort(s) << ")\n";
  for (auto& a : axiomAsserts) os << "(assert " << a << ")\n";
  for (auto& a : asserts) os << "(assert " << a << ")\n";
  return os.str();
}

std::string encode_smtlib(const EntailmentQuery& q, const std::vector<PredDecl>& preds,
                          const std::vector<QualP>& axioms) {
  return "(set-logic ALL)\n" + encode_body(q, preds, axioms) + "(check-sat)\n";
}

// ---------------------------------------------------------------- process

SmtProcess::SmtProcess(const std::string& cmd, int timeoutMs) : timeoutMs_(timeoutMs) {
  ::signal(SIGPIPE, SIG_IGN);
  int in[2], out[2];
  if (::pipe(in) != 0 || ::pipe(out) != 0) throw SolverSpawnError("pipe failed");
  pid_ = ::fork();
  if (pid_ < 0) throw SolverSpawnError("fork failed");
  if (pid_ == 0) {
    ::dup2(in[0], 0);
    ::dup2(out[1], 1);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, 2);
    ::close(in[0]);
    ::close(in[1]);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", ("exec " + cmd).c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  toSolver_ = in[1];
  fromSolver_ = out[0];
  send("(set-option :print-success false)\n(set-logic ALL)\n(set-option :timeout " +
       std::to_string(timeoutMs) + ")\n(echo \"@@ready\")\n");
  auto lines = read_until("@@ready");
  for (auto& l : lines)
    if (l.rfind("(error", 0) == 0) throw SolverProtocolError("solver rejected preamble: " + l);
}

SmtProcess::~SmtProcess() {
  if (toSolver_ >= 0) ::close(toSolver_);
  if (fromSolver_ >= 0) ::close(fromSolver_);
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void SmtProcess::send(const std::string& text) {
  size_t off = 0;
  while (off < text.size()) {
    ssize_t n = ::write(toSolver_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SolverSpawnError("solver pipe closed");
    }
    off += static_cast<size_t>(n);
  }
}

std::vector<std::string> SmtProcess::read_until(const std::string& marker) {
  std::vector<std::string> lines;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeoutMs_ + 5000);
  for (;;) {
    size_t nl;
    while ((nl = buffer_.find('\n')) != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line == marker) return lines;
      if (!line.empty()) lines.push_back(line);
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) throw SolverProtocolError("solver timed out");
    pollfd p{fromSolver_, POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) throw SolverProtocolError("solver timed out");
    char buf[4096];
    ssize_t n = ::read(fromSolver_, buf, sizeof buf);
    if (n <= 0) throw SolverSpawnError("solver exited");
    buffer_.append(buf, static_cast<size_t>(n));
  }
}

std::string SmtProcess::run(const std::string& body) {
  send("(push 1)\n" + body + "(check-sat)\n(pop 1)\n(echo \"@@end\")\n");
  auto lines = read_until("@@end");
  std::string answer;
  for (auto& l : lines) {
    if (l.rfind("(error", 0) == 0) throw SolverProtocolError(l);
    if (answer.empty()) answer = l;
  }
  if (answer.empty()) throw SolverProtocolError("no answer");
  return answer;
}

}  // namespace hegel
