#include "generators.hpp"

#include <algorithm>
#include <vector>

namespace hegel::testgen {

namespace {

struct Template {
  const char* name;
  const char* sig;
  bool needsLen;
};

const std::vector<Template>& component_pool() {
  static const std::vector<Template> pool = {
      {"inc", "(x : int) -> {v : int | v = x + 1}", false},
      {"dec", "(x : int) -> {v : int | v = x - 1}", false},
      {"add", "(x : int) -> (y : int) -> {v : int | v = x + y}", false},
      {"sub", "(x : int) -> (y : int) -> {v : int | v = x - y}", false},
      {"neg", "(x : int) -> {v : int | v = 0 - x}", false},
      {"max", "(x : int) -> (y : int) -> {v : int | v >= x /\\ v >= y}", false},
      {"min", "(x : int) -> (y : int) -> {v : int | v <= x /\\ v <= y}", false},
      {"dbl", "(x : int) -> {v : int | v = x + x}", false},
      {"isPos", "(x : int) -> {v : bool | (v => x > 0) /\\ (not v => x <= 0)}", false},
      {"length", "(xs : [a]) -> {v : nat | v = len xs}", true},
      {"tail", "(xs : [a]) -> {v : [a] | len v = len xs - 1}", true},
      {"cons", "(x : a) -> (xs : [a]) -> {v : [a] | len v = len xs + 1}", true},
      {"append", "(xs : [a]) -> (ys : [a]) -> {v : [a] | len v = len xs + len ys}", true},
      {"reverse", "(xs : [a]) -> {v : [a] | len v = len xs}", true},
      {"replicate", "(n : nat) -> (x : a) -> {v : [a] | len v = n}", true},
  };
  return pool;
}

struct Goal {
  const char* sig;
  bool needsLen;
};

const std::vector<Goal>& goal_pool() {
  static const std::vector<Goal> pool = {
      {"goal : (a : int) -> {v : int | v > a}", false},
      {"goal : (a : int) -> {v : int | v = a + 2}", false},
      {"goal : (a : int) -> (b : int) -> {v : int | v = a + b + 1}", false},
      {"goal : (a : int) -> (b : int) -> {v : int | v >= a /\\ v >= b}", false},
      {"goal : (a : int) -> (b : int) -> {v : int | v > a /\\ v > b}", false},
      {"goal : (a : int) -> {v : int | v = 0 - a - 1}", false},
      {"goal : (a : int) -> (b : int) -> {v : int | v = a - b}", false},
      {"goal : (a : int) -> {v : int | v = 4 * a}", false},
      {"goal : (xs : [b]) -> {v : int | v = len xs + 1}", true},
      {"goal : (xs : [b]) -> (ys : [b]) -> {v : [b] | len v = len xs + len ys - 1}", true},
      {"goal : (x : b) -> (xs : [b]) -> {v : [b] | len v = len xs + 1}", true},
      {"goal : (xs : [b]) -> {v : [b] | len v = len xs - 2}", true},
      {"goal : (xs : [b]) -> (n : nat) -> {v : int | v = len xs + n}", true},
      {"goal : (a : int) -> (xs : [b]) -> {v : bool | v => a > 0}", true},
      {"goal : (a : int) -> (b : int) -> int", false},
      {"goal : (a : int) -> {v : int | v <= a + 1}", false},
      {"goal : (a : int) -> (b : int) -> {v : int | v >= a}", false},
      {"goal : (xs : [b]) -> {v : [b] | len v <= len xs}", true},
      {"goal : (xs : [b]) -> (n : nat) -> {v : int | v >= 0}", true},
  };
  return pool;
}

}  // namespace

Instance random_instance(std::mt19937& rng, int components, int maxK) {
  const auto& pool = component_pool();
  const auto& goals = goal_pool();
  Instance inst;
  const Goal& g = goals[std::uniform_int_distribution<size_t>(0, goals.size() - 1)(rng)];
  std::vector<size_t> idx(pool.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<size_t>(std::min<int>(components, static_cast<int>(idx.size()))));
  std::sort(idx.begin(), idx.end());
  bool needsLen = g.needsLen;
  for (size_t i : idx) needsLen = needsLen || pool[i].needsLen;
  std::string text = needsLen ? "pred len : [a] -> int\n" : "";
  std::string names;
  for (size_t i : idx) {
    text += std::string(pool[i].name) + " : " + pool[i].sig + "\n";
    names += std::string(names.empty() ? "" : ",") + pool[i].name;
  }
  inst.k = std::uniform_int_distribution<int>(1, maxK)(rng);
  inst.libraryText = text;
  inst.queryText = g.sig;
  inst.name = "[" + names + "] " + g.sig + " k=" + std::to_string(inst.k);
  inst.lib = parse_library(text);
  inst.query = parse_query(inst.queryText, &inst.lib);
  return inst;
}

std::string example_library() {
  return "pred len : [a] -> int\n"
         "f : (l : {v : [a] | len v > 0}) -> {v : [a] | len v = len l}\n"
         "xs : {v : [int] | len v = 1}\n"
         "ys : [char]\n"
         "g : (l : [char]) -> [char]\n";
}

std::string example_query() { return "goal : {v : [int] | len v > 0}\n"; }

}  // namespace hegel::testgen
