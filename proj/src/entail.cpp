#include <algorithm>
#include <cstdlib>

#include "hegel/entail.hpp"
#include "smt_internal.hpp"

namespace hegel {

std::string default_smt_cmd() {
  if (const char* e = std::getenv("HEGEL_SMT_CMD"); e && *e) return e;
  return "z3 -in";
}

QualP interpret_context(const Context& ctx, const std::vector<QualP>& props) {
  std::vector<QualP> parts;
  for (auto& [x, t] : ctx)
    if (t->kind == RType::Kind::Base) parts.push_back(base_qual_as(t, x));
  for (auto& p : props) parts.push_back(p);
  return q_and(std::move(parts));
}

Context slice_context(const EntailmentQuery& q) {
  std::set<std::string> want;
  auto add = [&](const QualP& f) {
    auto fv = free_vars(f);
    want.insert(fv.begin(), fv.end());
  };
  add(qual_subst(q.antecedent, q.subst));
  add(qual_subst(q.consequent, q.subst));
  for (auto& p : q.props) add(p);
  std::vector<bool> keep(q.context.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < q.context.size(); ++i) {
      auto& [x, t] = q.context[i];
      if (keep[i] || !want.count(x) || x == q.valueVar) continue;
      keep[i] = true;
      changed = true;
      if (t->kind == RType::Kind::Base) add(base_qual_as(t, x));
    }
  }
  Context out;
  for (size_t i = 0; i < q.context.size(); ++i)
    if (keep[i]) out.push_back(q.context[i]);
  return out;
}

// ---------------------------------------------------------------- canonical form

namespace {

QualP debruijn(const QualP& q, int depth) {
  if (q->kind == Qual::Kind::Forall || q->kind == Qual::Kind::Exists) {
    std::string b = "#" + std::to_string(depth);
    QualP body = qual_rename(q->kids[0], q->name, b);
    return q_quant(q->kind, b, q->sort, debruijn(body, depth + 1));
  }
  if (q->kids.empty()) return q;
  Qual c = *q;
  for (auto& k : c.kids) k = debruijn(k, depth);
  return std::make_shared<const Qual>(std::move(c));
}

void conjuncts(const QualP& q, std::vector<QualP>& out) {
  if (q->kind == Qual::Kind::And) {
    for (auto& k : q->kids) conjuncts(k, out);
  } else if (!is_true(q)) {
    out.push_back(q);
  }
}

// Orients symmetric and mirrored relations and orders commutative operands so
// equal atoms print equally.
QualP normalize_atom(const QualP& in) {
  QualP q = in;
  if (!q->kids.empty()) {
    Qual c = *q;
    for (auto& k : c.kids) k = normalize_atom(k);
    if ((c.kind == Qual::Kind::Add || c.kind == Qual::Kind::Mul) && c.kids.size() == 2 &&
        pretty(c.kids[1]) < pretty(c.kids[0]))
      std::swap(c.kids[0], c.kids[1]);
    q = std::make_shared<const Qual>(std::move(c));
  }
  auto flip = [](Qual::Kind k) {
    return k == Qual::Kind::Ge ? Qual::Kind::Le : Qual::Kind::Lt;
  };
  if (q->kind == Qual::Kind::Ge || q->kind == Qual::Kind::Gt)
    return q_bin(flip(q->kind), q->kids[1], q->kids[0]);
  if ((q->kind == Qual::Kind::Eq || q->kind == Qual::Kind::Ne) &&
      pretty(q->kids[1]) < pretty(q->kids[0]))
    return q_bin(q->kind, q->kids[1], q->kids[0]);
  return q;
}

std::vector<std::string> atom_texts(const QualP& q) {
  std::vector<QualP> cs;
  conjuncts(q, cs);
  std::vector<std::string> out;
  for (auto& c : cs) out.push_back(pretty(debruijn(normalize_atom(c), 0)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string canonical_key(const EntailmentQuery& q) {
  Context ctx = slice_context(q);
  // Binders are renamed by context position so that queries differing only in
  // binder names share an entry.
  NameSubst rename{{q.valueVar, q_var("%v")}};
  for (auto& [n, t] : ctx)
    if (!rename.count(n)) rename.emplace(n, q_var("%" + std::to_string(rename.size())));
  QualP ant = qual_subst(q_and2(interpret_context(ctx, q.props), qual_subst(q.antecedent, q.subst)), rename);
  // Existentials of the antecedent become free witnesses, named after the
  // binders in order of appearance.
  std::vector<std::string> witnessSorts;
  std::vector<QualP> pending{ant}, opened;
  while (!pending.empty()) {
    QualP c = pending.front();
    pending.erase(pending.begin());
    if (c->kind == Qual::Kind::And) {
      pending.insert(pending.begin(), c->kids.begin(), c->kids.end());
    } else if (c->kind == Qual::Kind::Exists) {
      std::string w = "%" + std::to_string(rename.size() + witnessSorts.size());
      witnessSorts.push_back(w + ":" + to_string(c->sort));
      pending.insert(pending.begin(), qual_subst(c->kids[0], {{c->name, q_var(w)}}));
    } else {
      opened.push_back(c);
    }
  }
  ant = q_and(opened);
  std::string key;
  for (auto& a : atom_texts(ant)) key += a + " & ";
  key += "|- ";
  for (auto& c : atom_texts(qual_subst(qual_subst(q.consequent, q.subst), rename))) key += c + " & ";
  key += "@ " + to_string(q.valueSort);
  std::vector<std::string> sorts;
  for (auto& [n, t] : ctx)
    if (t->kind == RType::Kind::Base) sorts.push_back(pretty(rename.at(n)) + ":" + to_string(t->base));
  sorts.insert(sorts.end(), witnessSorts.begin(), witnessSorts.end());
  std::sort(sorts.begin(), sorts.end());
  for (auto& s : sorts) key += " " + s;
  return key;
}

OracleVerdict fallback_prove(const EntailmentQuery& q) {
  QualP cons = qual_subst(q.consequent, q.subst);
  QualP ant = q_and2(interpret_context(q.context, q.props), qual_subst(q.antecedent, q.subst));
  if (is_true(cons) || is_false(ant)) return OracleVerdict::valid();
  auto have = atom_texts(ant);
  if (std::binary_search(have.begin(), have.end(), "false")) return OracleVerdict::valid();
  for (auto& c : atom_texts(cons))
    if (!std::binary_search(have.begin(), have.end(), c))
      return OracleVerdict::unknown("fallback prover cannot decide");
  return OracleVerdict::valid();
}

// ---------------------------------------------------------------- oracle

Oracle::Oracle(OracleConfig cfg, std::vector<PredDecl> preds, std::vector<QualP> axioms)
    : cfg_(std::move(cfg)), preds_(std::move(preds)), axioms_(std::move(axioms)) {}

Oracle::~Oracle() = default;

void Oracle::set_signature(std::vector<PredDecl> preds, std::vector<QualP> axioms) {
  preds_ = std::move(preds);
  axioms_ = std::move(axioms);
  cache_.clear();
}

std::string Oracle::raw_answer(const std::string& script) {
  if (!proc_) proc_ = std::make_unique<SmtProcess>(cfg_.smtCmd, cfg_.timeoutMs);
  return proc_->run(script);
}

OracleVerdict Oracle::ask_solver(const EntailmentQuery& q) {
  std::string body = encode_body(q, preds_, axioms_);
  if (solverBroken_) throw SolverSpawnError("solver unavailable");
  std::string ans;
  try {
    ans = raw_answer(body);
  } catch (const SolverSpawnError&) {
    proc_.reset();
    try {
      ans = raw_answer(body);
    } catch (const SolverSpawnError&) {
      proc_.reset();
      solverBroken_ = true;
      throw;
    }
  } catch (const SolverProtocolError&) {
    proc_.reset();
    throw;
  }
  if (ans == "unsat") return OracleVerdict::valid();
  if (ans == "sat") return OracleVerdict::invalid();
  return OracleVerdict::unknown("solver answered " + ans);
}

OracleVerdict Oracle::check(const EntailmentQuery& q) {
  QualP ant = qual_subst(q.antecedent, q.subst);
  QualP cons = qual_subst(q.consequent, q.subst);
  if (is_true(cons) || is_false(ant) || qual_equal(ant, cons)) {
    ++stats_.trivial;
    return OracleVerdict::valid();
  }
  std::string key = canonical_key(q);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.cacheHits;
    if (it->second.is_unknown()) ++stats_.unknowns;
    return it->second;
  }
  ++stats_.queriesIssued;
  auto t0 = std::chrono::steady_clock::now();
  OracleVerdict v;
  try {
    v = ask_solver(q);
  } catch (const UnsupportedConstruct& e) {
    ++stats_.fallbacks;
    v = fallback_prove(q);
  } catch (const SolverSpawnError& e) {
    ++stats_.fallbacks;
    v = fallback_prove(q);
  } catch (const SolverProtocolError& e) {
    ++stats_.fallbacks;
    v = fallback_prove(q);
    if (v.is_unknown()) v.reason = e.what();
  }
  stats_.totalSolverMillis +=
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (v.is_unknown()) ++stats_.unknowns;
  cache_.emplace(std::move(key), v);
  return v;
}

OracleVerdict entails(Oracle& o, const Context& ctx, const std::vector<QualP>& props,
                      const QualP& lhs, const QualP& rhs, const BaseType& s,
                      const std::string& valueVar) {
  EntailmentQuery q;
  q.context = ctx;
  q.props = props;
  q.antecedent = lhs;
  q.consequent = rhs;
  q.valueSort = s;
  q.valueVar = valueVar;
  return o.check(q);
}

}  // namespace hegel
