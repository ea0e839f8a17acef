#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hegel/entail.hpp"
#include "hegel/syntax.hpp"

namespace hegel {

struct CheckContext {
  std::vector<std::pair<std::string, RTypeP>> bindings;
  std::vector<QualP> pathConditions;
};

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library components, declared constants' types are not bindings (literals
// carry their own types).
CheckContext library_context(const Library& lib);

// Checks an ANF term (optionally wrapped in lambdas) against `expected`.
// `why` receives a one-line diagnostic on failure.
bool type_check(const CheckContext& ctx, const TermP& t, const RTypeP& expected, Oracle& oracle,
                std::string* why = nullptr, const Library* lib = nullptr);

bool subtype_check(const CheckContext& ctx, const RTypeP& t1, const RTypeP& t2, Oracle& oracle);

struct BruteOptions {
  int maxComponents = 6;
  bool conditionals = true;
  size_t maxTerms = 0;  // 0: all
};

// All terms of at most k calls over the library and query arguments that
// check against the query, as `fun args -> body` in ANF, ascending size.
std::vector<TermP> brute_force_synthesize(const Library& lib, const Query& query, int k,
                                          Oracle& oracle, const BruteOptions& opts = {});

// Wraps an ANF body into `fun x y z -> body` with the query's argument types.
TermP wrap_solution(const Query& query, const TermP& body);

}  // namespace hegel
