#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "hegel/automaton.hpp"
#include "hegel/construct.hpp"
#include "hegel/entail.hpp"

namespace hegel {

struct ReductionStats {
  long transitionsPruned = 0;
  long pairsRecorded = 0;
  long transitionsMerged = 0;
  long stalePairs = 0;
};

// Ordered pairs (retained, removed) of transition ids; the retained
// transition's type is the subtype.
struct SimilaritySet {
  std::vector<std::pair<int, int>> pairs;
  std::set<std::pair<int, int>> seen;
  bool add(int retained, int removed) {
    if (!seen.insert({retained, removed}).second) return false;
    pairs.emplace_back(retained, removed);
    return true;
  }
  bool empty() const { return pairs.empty(); }
};

inline constexpr int kBottom = -1;

// Product construction over same-symbol transitions; kBottom when the trees
// cannot agree.
int syntactic_intersection(LTA& a, int d1, int d2);

// di when Γ ∧ θ(φ_i) ⟹ θ(φ_j) is valid or undecided, kBottom when invalid.
int semantic_intersection(const LTA& a, int di, int dj, const NameSubst& theta,
                          const BaseType& sort, const Context& env, Oracle& oracle);

void prune(LTA& a, TransitionChecker& tc, ReductionStats& stats);

struct SimilarityBudget {
  long maxPairs = 50000;  // subtype checks per call
};

void similarity(ConstructionState& cs, SimilaritySet& e, TransitionChecker& tc,
                const SimilarityBudget& budget, ReductionStats& stats);

// Merges every removed state into its retained partner and clears e.
void minimize(LTA& a, SimilaritySet& e, ReductionStats& stats);

}  // namespace hegel
