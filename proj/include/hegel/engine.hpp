#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hegel/automaton.hpp"
#include "hegel/construct.hpp"
#include "hegel/entail.hpp"
#include "hegel/reduce.hpp"
#include "hegel/syntax.hpp"

namespace hegel {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SynthesisConfig {
  int k = 5;                  // bound on library calls
  int maxTerms = 10;          // solution cap
  int smtTimeoutMs = 2000;
  bool pruneEnabled = true;
  bool similarityEnabled = true;
  bool conditionals = true;
  int denoteMaxDepth = 5;
  SimilarityBudget similarityBudget;

  void validate() const;
};

struct PhaseMillis {
  double construct = 0, prune = 0, similarity = 0, minimize = 0, nempty = 0, extract = 0;
};

struct RunStats {
  long statesBeforeMin = 0;
  long statesAfterMin = 0;
  long transitionsMerged = 0;
  long transitionsPruned = 0;
  long pairsRecorded = 0;
  long smtQueries = 0;
  long cacheHits = 0;
  long unknowns = 0;
  double smtMillis = 0;
  std::uint64_t termsEnumerated = 0;
  int rounds = 0;
  PhaseMillis wallMillis;
  std::vector<std::string> discrepancies;
};

struct SynthesisResult {
  bool solved = false;
  std::vector<TermP> terms;  // `fun args -> body`, ascending call count
  RunStats stats;
  LTA automaton;             // final snapshot
};

// Terms of the goal state, wrapped and re-checked by the independent checker;
// failures are dropped and logged in stats.discrepancies.
std::vector<TermP> extract_terms(const ConstructionState& cs, const Library& lib, const Query& query,
                                 const SynthesisConfig& cfg, TransitionChecker& tc, Oracle& oracle,
                                 RunStats& stats);

SynthesisResult lta_synthesize(const Library& lib, const Query& query, const SynthesisConfig& cfg,
                               Oracle& oracle);

// Stats as JSON; timing fields live under "wallMillis".
nlohmann::json stats_json(const RunStats& s);

}  // namespace hegel
