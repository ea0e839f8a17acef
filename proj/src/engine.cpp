#include "hegel/engine.hpp"

#include <chrono>

#include "hegel/check.hpp"

namespace hegel {

using K = Symbol::Kind;

void SynthesisConfig::validate() const {
  if (k < 0) throw ConfigError("k must be non-negative");
  if (maxTerms < 1) throw ConfigError("maxTerms must be at least 1");
  if (smtTimeoutMs < 1) throw ConfigError("smtTimeoutMs must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Appends bindings of term states created since the last call; the context
// only grows so that evaluators may index it incrementally.
void extend_env(const LTA& a, Context& env, int& watermark) {
  for (int q = watermark; q < a.state_count(); ++q) {
    const State& s = a.state(q);
    if (!s.alive || s.role != State::Role::Term || s.termKind == K::Const) continue;
    if (s.key.rfind("pending|", 0) == 0) continue;
    env.emplace_back(s.name, s.type);
  }
  watermark = a.state_count();
}

Library with_query_constants(const Library& lib, const Query& query) {
  Library out = lib;
  for (auto& c : query.constants) out.constants.push_back(c);
  return out;
}

}  // namespace

std::vector<TermP> extract_terms(const ConstructionState& cs, const Library& lib, const Query& query,
                                 const SynthesisConfig& cfg, TransitionChecker& tc, Oracle& oracle,
                                 RunStats& stats) {
  DenoteBudget budget;
  budget.maxSize = cs.lta.depth;
  budget.maxTerms = cfg.maxTerms;
  budget.maxDepth = cfg.denoteMaxDepth;
  std::vector<SymTreeP> trees = denote(cs.lta, cs.goal, budget, tc);

  Library checkLib = with_query_constants(lib, query);
  CheckContext ctx = library_context(checkLib);
  RTypeP expected = query.as_type();
  std::set<std::string> seen;
  std::vector<TermP> out;
  for (auto& t : trees) {
    TermP body = canonical_binders(to_anf(tree_to_term(t)));
    if (!seen.insert(pretty(body)).second) continue;
    TermP sol = wrap_solution(query, body);
    std::string why;
    if (!type_check(ctx, sol, expected, oracle, &why, &checkLib)) {
      stats.discrepancies.push_back(pretty(sol) + ": " + why);
      continue;
    }
    out.push_back(sol);
    if (static_cast<int>(out.size()) >= cfg.maxTerms) break;
  }
  return out;
}

SynthesisResult lta_synthesize(const Library& lib, const Query& query, const SynthesisConfig& cfg,
                               Oracle& oracle) {
  cfg.validate();
  SynthesisResult res;
  RunStats& st = res.stats;

  auto t0 = Clock::now();
  ConstructionOptions copts;
  copts.conditionals = cfg.conditionals;
  ConstructionState cs = wf_init(lib, query, copts);
  st.wallMillis.construct += since(t0);

  std::vector<PredDecl> preds = lib.predicates;
  for (auto& p : query.predicates) preds.push_back(p);
  for (auto& p : cs.predVars) preds.push_back(p);
  std::vector<QualP> axioms = lib.axioms;
  for (auto& x : query.axioms) axioms.push_back(x);
  oracle.set_signature(preds, axioms);
  OracleStats base = oracle.stats();

  Context env;
  int watermark = 0;
  extend_env(cs.lta, env, watermark);
  TransitionChecker tc(cs.lta, env, oracle);
  ReductionStats rs;
  SimilaritySet sim;

  auto finish = [&]() {
    const OracleStats& os = oracle.stats();
    st.smtQueries = os.queriesIssued - base.queriesIssued;
    st.cacheHits = os.cacheHits - base.cacheHits;
    st.unknowns = os.unknowns - base.unknowns;
    st.smtMillis = os.totalSolverMillis - base.totalSolverMillis;
    st.transitionsPruned = rs.transitionsPruned;
    st.transitionsMerged = rs.transitionsMerged;
    st.pairsRecorded = rs.pairsRecorded;
    st.rounds = cs.lta.depth;
    res.automaton = cs.lta;
    return res;
  };

  auto try_extract = [&]() {
    auto tn = Clock::now();
    bool live = nempty(cs.lta, cs.lta.depth, tc).count(cs.goal) > 0;
    st.wallMillis.nempty += since(tn);
    if (!live) return false;
    auto te = Clock::now();
    res.terms = extract_terms(cs, lib, query, cfg, tc, oracle, st);
    st.wallMillis.extract += since(te);
    res.solved = !res.terms.empty();
    return res.solved;
  };

  st.statesBeforeMin = st.statesAfterMin = cs.lta.alive_states();
  if (try_extract()) return finish();

  while (cs.lta.depth < cfg.k) {
    auto ts = Clock::now();
    tc.reset();
    transition_step(cs);
    extend_env(cs.lta, env, watermark);
    st.wallMillis.construct += since(ts);
    st.statesBeforeMin = cs.lta.alive_states();

    if (cfg.pruneEnabled) {
      auto tp = Clock::now();
      prune(cs.lta, tc, rs);
      st.wallMillis.prune += since(tp);
    }
    if (cfg.similarityEnabled) {
      auto tsim = Clock::now();
      similarity(cs, sim, tc, cfg.similarityBudget, rs);
      st.wallMillis.similarity += since(tsim);
      auto tm = Clock::now();
      minimize(cs.lta, sim, rs);
      st.wallMillis.minimize += since(tm);
    }
    st.statesAfterMin = cs.lta.alive_states();
    st.termsEnumerated += count_candidates(cs.lta, cs.goal, cs.lta.depth, tc);
    if (try_extract()) return finish();
  }
  return finish();
}

nlohmann::json stats_json(const RunStats& s) {
  nlohmann::json j;
  j["schema"] = 1;
  j["statesBeforeMin"] = s.statesBeforeMin;
  j["statesAfterMin"] = s.statesAfterMin;
  j["transitionsMerged"] = s.transitionsMerged;
  j["transitionsPruned"] = s.transitionsPruned;
  j["pairsRecorded"] = s.pairsRecorded;
  j["smtQueries"] = s.smtQueries;
  j["cacheHits"] = s.cacheHits;
  j["unknowns"] = s.unknowns;
  j["termsEnumerated"] = s.termsEnumerated;
  j["rounds"] = s.rounds;
  j["discrepancies"] = s.discrepancies;
  j["wallMillis"] = {{"construct", s.wallMillis.construct}, {"prune", s.wallMillis.prune},
                     {"similarity", s.wallMillis.similarity}, {"minimize", s.wallMillis.minimize},
                     {"nempty", s.wallMillis.nempty},   {"extract", s.wallMillis.extract},
                     {"smt", s.smtMillis}};
  return j;
}

}  // namespace hegel
