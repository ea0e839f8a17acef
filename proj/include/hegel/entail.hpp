#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "hegel/syntax.hpp"

namespace hegel {

using Context = std::vector<std::pair<std::string, RTypeP>>;

struct EntailmentQuery {
  Context context;
  std::vector<QualP> props;  // path conditions and other recorded propositions
  NameSubst subst;           // applied to antecedent and consequent
  QualP antecedent;
  QualP consequent;
  BaseType valueSort;
  std::string valueVar = "v";
};

struct OracleVerdict {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  std::string reason;

  static OracleVerdict valid() { return {Kind::Valid, {}}; }
  static OracleVerdict invalid() { return {Kind::Invalid, {}}; }
  static OracleVerdict unknown(std::string r) { return {Kind::Unknown, std::move(r)}; }
  bool is_valid() const { return kind == Kind::Valid; }
  bool is_invalid() const { return kind == Kind::Invalid; }
  bool is_unknown() const { return kind == Kind::Unknown; }
};

struct OracleStats {
  long queriesIssued = 0;
  long cacheHits = 0;
  double totalSolverMillis = 0;
  long trivial = 0;    // answered by the shortcut, not counted as lookups
  long unknowns = 0;   // Unknown verdicts handed to callers
  long fallbacks = 0;  // solver failures answered by the fallback prover
};

struct SolverSpawnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedConstruct : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conjunction of the refinements of base-typed bindings with the binder
// substituted for the value variable, followed by the propositions.
QualP interpret_context(const Context& ctx, const std::vector<QualP>& props = {});

// Deterministic SMT-LIB2 script that is unsat iff the query is valid.
// Predicate sorts come from `preds`; polymorphic axioms are instantiated at
// the sorts used by the query.
std::string encode_smtlib(const EntailmentQuery& q, const std::vector<PredDecl>& preds,
                          const std::vector<QualP>& axioms = {});

// Sound syntactic prover. Never answers Invalid.
OracleVerdict fallback_prove(const EntailmentQuery& q);

// Canonical cache key: sorted conjuncts, de Bruijn binders.
std::string canonical_key(const EntailmentQuery& q);

// Drops context bindings outside the cone of influence of the formulas.
Context slice_context(const EntailmentQuery& q);

std::string default_smt_cmd();

struct OracleConfig {
  std::string smtCmd = default_smt_cmd();
  int timeoutMs = 2000;
};

class SmtProcess;

class Oracle {
 public:
  explicit Oracle(OracleConfig cfg = {}, std::vector<PredDecl> preds = {},
                  std::vector<QualP> axioms = {});
  ~Oracle();
  Oracle(const Oracle&) = delete;
  Oracle& operator=(const Oracle&) = delete;

  OracleVerdict check(const EntailmentQuery& q);
  void set_signature(std::vector<PredDecl> preds, std::vector<QualP> axioms);
  const OracleStats& stats() const { return stats_; }
  const OracleConfig& config() const { return cfg_; }
  // Runs one raw script and returns the solver's answer line.
  std::string raw_answer(const std::string& script);

 private:
  OracleVerdict ask_solver(const EntailmentQuery& q);

  OracleConfig cfg_;
  std::vector<PredDecl> preds_;
  std::vector<QualP> axioms_;
  std::unique_ptr<SmtProcess> proc_;
  bool solverBroken_ = false;
  std::unordered_map<std::string, OracleVerdict> cache_;
  OracleStats stats_;
};

// Convenience: Γ ⊢ lhs ⟹ rhs with ν of sort `s`.
OracleVerdict entails(Oracle& o, const Context& ctx, const std::vector<QualP>& props,
                      const QualP& lhs, const QualP& rhs, const BaseType& s,
                      const std::string& valueVar = "v");

}  // namespace hegel
