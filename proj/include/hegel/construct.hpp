#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hegel/automaton.hpp"
#include "hegel/entail.hpp"
#include "hegel/syntax.hpp"

namespace hegel {

struct IllFormedType : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CycleConstraintViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstructionOptions {
  bool conditionals = true;  // top-level if-then-else over boolean terms
};

struct ConstructionState {
  LTA lta;
  Library lib;  // binders renamed apart from the query
  Query query;
  ConstructionOptions opts;

  std::map<std::string, int> interned;  // canonical key -> state
  int goal = -1;
  int goalType = -1;
  std::set<std::string> functions;      // call heads counted by the size metric
  std::set<std::pair<int, int>> appPairs;
  std::set<std::tuple<int, int, int>> ifTriples;
  int freshAlpha = 0, freshKappa = 0;

  // Names whose identity matters to some type: free in the goal, in query
  // argument types, or in library types.
  std::set<std::string> mentioned;
  // Types of dependent parameters of library functions.
  std::vector<RTypeP> dependentParams;
  // Predicate variables of abstract refinements, uninterpreted in the oracle.
  std::vector<PredDecl> predVars;
  // State-id watermark for similarity: states below it were already compared.
  int scanned = 0;
};

// Type with refinements over ν, quantifiers stripped; library type variables
// become flexible ('0, '1, ... in order of first occurrence).
RTypeP canonical_type(const RTypeP& t, bool flexible);
bool is_flexible(const std::string& tyvar);
bool unify(const BaseType& a, const BaseType& b, TyInst& s);
BaseType resolve_tyvars(const BaseType& t, const TyInst& s);

ConstructionState wf_init(const Library& lib, const Query& query, ConstructionOptions opts = {});

// Interned wf states.
int type_state(ConstructionState& cs, const RTypeP& canonical, const std::string& binder);
int leaf_state(ConstructionState& cs, const Symbol& s);

// SubType over positions whose types are ti and tj (shape taken from the types).
ConstraintP subtype_constraint(const RTypeP& ti, const Position& pi, const RTypeP& tj,
                               const Position& pj);
// SubType between two type transitions, rooted at a pair node (left, right).
ConstraintP subtype_constraint(const LTA& a, int di, int dj);

struct AppPlan {
  RTypeP result;        // canonical result type
  InstP inst;           // per child: type, fun, arg
  TyInst alpha;         // M_α: flexible variables of the function to base types
  QualP kappa;          // M_κ: the result refinement (base results)
};

// Solve for app(fun, arg): unification of erased shapes, then the strongest
// postcondition of the function's result under the argument.
std::optional<AppPlan> plan_app(const ConstructionState& cs, int fun, int arg);

// Adds an app transition whose type child is a fresh {ν : α | κ} placeholder.
int add_placeholder_app(ConstructionState& cs, int fun, int arg);
struct Inference {
  int transition = -1;  // replacement transition, or -1 when it became Bottom
  TyInst alpha;
  std::map<std::string, QualP> kappa;
};
Inference infer_transition_types(ConstructionState& cs, int transition);

// One expansion round; returns the ids of the states it created.
std::vector<int> transition_step(ConstructionState& cs);

Context build_env(const LTA& a);

// Term states whose identity no type depends on; similarity may merge them.
bool name_insensitive(const ConstructionState& cs, int state);

}  // namespace hegel
