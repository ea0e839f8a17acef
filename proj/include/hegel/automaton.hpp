#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <set>
#include <string>
#include <vector>

#include "hegel/entail.hpp"
#include "hegel/syntax.hpp"

namespace hegel {

// Name of the value variable inside automaton refinements.
inline const std::string kNu = "ν";

// ---------------------------------------------------------------- symbols

struct Symbol {
  enum class Kind {
    Var, Const, App, If, Goal,        // term level
    TyBase, TyArrow,                  // type constructors
    VarLeaf, BaseLeaf, QualLeaf,      // wf leaves
    Pair,                             // synthetic root joining two states
    Bottom
  };
  Kind kind = Kind::Bottom;
  std::string name;  // Var, VarLeaf
  Literal lit;       // Const
  BaseType base;     // BaseLeaf
  QualP qual;        // QualLeaf

  static Symbol var(std::string n) { return {Kind::Var, std::move(n), {}, {}, {}}; }
  static Symbol constant(Literal l) { return {Kind::Const, {}, l, {}, {}}; }
  static Symbol of(Kind k) { return {k, {}, {}, {}, {}}; }
  static Symbol var_leaf(std::string n) { return {Kind::VarLeaf, std::move(n), {}, {}, {}}; }
  static Symbol base_leaf(BaseType b) { return {Kind::BaseLeaf, {}, {}, std::move(b), {}}; }
  static Symbol qual_leaf(QualP q) { return {Kind::QualLeaf, {}, {}, {}, std::move(q)}; }
};

int arity(const Symbol& s);
bool symbol_equal(const Symbol& a, const Symbol& b);
std::string to_string(const Symbol& s);
bool is_term_symbol(Symbol::Kind k);

// ---------------------------------------------------------------- positions

using Position = std::vector<int>;

// Child index of `label` under a symbol of kind `k`, or 0.
int label_index(Symbol::Kind k, const std::string& label);
std::string label_name(Symbol::Kind k, int index);
// Parses "arg.type.ref" relative to a root symbol; numeric steps accepted.
Position parse_position(Symbol::Kind root, const std::string& text);
std::string render_position(const Position& p);

struct PosSubst {
  std::vector<std::pair<Position, Position>> pairs;  // (replacement, target)
};

struct Constraint;
using ConstraintP = std::shared_ptr<const Constraint>;

struct Constraint {
  enum class Kind { True, False, SynEq, SemEnt, Not, And, Or, Subst, Assume };
  Kind kind = Kind::True;
  Position p1, p2;  // atoms; Assume uses p1 as the condition
  PosSubst sub;
  bool polarity = true;
  std::vector<ConstraintP> kids;
};

ConstraintP c_true();
ConstraintP c_false();
ConstraintP c_syn(Position a, Position b);
ConstraintP c_sem(Position a, Position b);
ConstraintP c_not(ConstraintP c);
ConstraintP c_and(std::vector<ConstraintP> cs);
ConstraintP c_or(std::vector<ConstraintP> cs);
ConstraintP c_subst(PosSubst s, ConstraintP body);
ConstraintP c_assume(Position cond, bool polarity, ConstraintP body);
std::string render_constraint(const ConstraintP& c);
void constraint_positions(const ConstraintP& c, std::vector<Position>& out);

// ---------------------------------------------------------------- automaton

using TyInst = std::map<std::string, BaseType>;
using InstP = std::shared_ptr<const std::vector<TyInst>>;

struct Transition {
  int id = -1;
  Symbol sym;
  std::vector<int> children;
  ConstraintP psi;
  int target = -1;
  bool alive = true;
  // Type-variable instantiation applied when reading below child j.
  InstP inst;
};

struct State {
  enum class Role { Term, Type, Leaf, Goal };
  int id = -1;
  Role role = Role::Leaf;
  bool alive = true;
  std::string name;     // term states: variable name or binder; type states: binder
  RTypeP type;          // term and type states
  int size = 0;         // term states: call count of every member
  int typeState = -1;   // term states: their type child
  Symbol::Kind termKind = Symbol::Kind::Bottom;  // Var/Const/App/If for term states
  std::string key;
};

class LTA {
 public:
  int add_state(State s);
  int add_transition(Symbol sym, std::vector<int> children, ConstraintP psi, int target,
                     InstP inst = nullptr);
  void remove_transition(int id);
  void remove_state(int id);

  const Transition& transition(int id) const { return transitions_[static_cast<size_t>(id)]; }
  const State& state(int id) const { return states_[static_cast<size_t>(id)]; }
  State& state_mut(int id) { return states_[static_cast<size_t>(id)]; }
  int state_count() const { return static_cast<int>(states_.size()); }
  int transition_count() const { return static_cast<int>(transitions_.size()); }
  int alive_states() const;
  int alive_transitions() const;

  std::vector<int> incoming(int q) const;  // alive, id order
  std::vector<int> users(int q) const;     // alive transitions with q as a child
  std::vector<int> by_symbol(Symbol::Kind k) const;

  std::set<int> finals;
  std::set<int> pinned;  // kept by normalize even when unreachable
  int depth = 0;

 private:
  std::vector<State> states_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<int>> byTarget_;
  std::vector<std::vector<int>> byChild_;
  std::map<Symbol::Kind, std::vector<int>> bySymbol_;
};

// q ▶ p and δ ▶ p.
std::set<int> at_position(const LTA& a, int state, const Position& p);
std::set<int> at_position_from_transition(const LTA& a, int transition, const Position& p);

// ---------------------------------------------------------------- trees

struct SymTree;
using SymTreeP = std::shared_ptr<const SymTree>;

struct SymTree {
  Symbol sym;
  std::vector<SymTreeP> kids;
  int state = -1;
  int transition = -1;
  std::string binder;                      // App/If nodes and state stubs
  InstP inst;
};

struct PositionUnresolved : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Tri { False, True, Unknown };

// Constraint evaluation over a tree; SemEnt atoms go to the oracle.
class Evaluator {
 public:
  Evaluator(const Context& env, Oracle& oracle) : env_(env), oracle_(oracle) {}
  Tri eval(const SymTreeP& root, const ConstraintP& c);
  Oracle& oracle() { return oracle_; }
  const Context& env() const { return env_; }
  // Existentials in a consequent are instantiated with the antecedent's
  // witnesses; when set, a failed instantiation is Unknown instead of a
  // quantified solver query.
  void set_strengthen_only(bool on) { strengthenOnly_ = on; }

 private:
  struct Frame {
    std::vector<NameSubst> substs;  // outermost first
    Context extra;
    std::vector<QualP> props;
  };
  Tri eval_in(const SymTreeP& root, const ConstraintP& c, Frame& f);
  Tri entail(const QualP& lhs, const QualP& rhs, const BaseType& sort, const Frame& f);
  const RTypeP* lookup(const std::string& name, const Frame& f);
  const Context& env_;
  Oracle& oracle_;
  std::map<std::string, size_t> index_;
  size_t indexed_ = 0;
  bool strengthenOnly_ = false;
};

bool term_satisfies(const SymTreeP& t, const ConstraintP& c, const Context& env, Oracle& oracle);

// Helpers shared by constraint evaluation and the reductions.
struct Resolved {
  SymTreeP node;
  TyInst inst;
};
Resolved resolve(const SymTreeP& root, const Position& p);
QualP position_name(const Resolved& r);
BaseType resolved_base(const Resolved& r);
QualP resolved_qual(const Resolved& r);
RTypeP tree_type(const SymTreeP& t);  // TyBase/TyArrow tree to a type
SymTreeP type_tree(const RTypeP& t, const std::string& binder);

// ---------------------------------------------------------------- analyses

// Transition validity on a representative tree (type children plus state stubs).
class TransitionChecker {
 public:
  TransitionChecker(const LTA& a, const Context& env, Oracle& oracle)
      : a_(a), eval_(env, oracle) {}
  Tri check(int transition);
  // True when the constraint needs whole terms rather than state stubs.
  bool per_term(int transition);
  SymTreeP representative(int transition);
  SymTreeP stub(int state);
  Evaluator& evaluator() { return eval_; }
  void forget(int transition) { cache_.erase(transition); }
  // Drops every memoized verdict; later checks are answered through the oracle's cache.
  void reset() { cache_.clear(); }
  // Unique tree of a type or leaf state; throws PositionUnresolved if ambiguous.
  SymTreeP state_tree(int state);

 private:
  const LTA& a_;
  Evaluator eval_;
  std::map<int, Tri> cache_;
  std::set<int> perTerm_;
  std::map<int, SymTreeP> typeTrees_;
};

struct DenoteBudget {
  int maxSize = 3;     // call-count bound
  int maxTerms = 100;  // cap per (state, size) list and on the result
  int maxDepth = 5;    // re-entries into cyclic states
};

// Terms of the sub-automaton at `root` in ascending size, constraint-filtered.
std::vector<SymTreeP> denote(const LTA& a, int root, const DenoteBudget& b, TransitionChecker& tc);

// Number of candidate terms the bottom-up enumerator builds below `root`.
std::uint64_t count_candidates(const LTA& a, int root, int maxSize, TransitionChecker& tc);

std::set<int> nempty(const LTA& a, int maxSize, TransitionChecker& tc);
bool inhabited(const LTA& a, int state, int maxSize, TransitionChecker& tc);

// Removes Bottom transitions, transitions with an empty child, and states
// unreachable from the finals and the live term states.
void normalize(LTA& a);

struct DepGraph {
  std::map<int, std::set<int>> edges;  // child -> targets
  std::set<int> cyclic;
};
DepGraph dependency_graph(const LTA& a);
bool constraint_well_formed(const LTA& a, int transition, const DepGraph& g);

TermP tree_to_term(const SymTreeP& t);
int tree_size(const SymTreeP& t);

std::string dump_text(const LTA& a);
std::string dump_dot(const LTA& a);

}  // namespace hegel
