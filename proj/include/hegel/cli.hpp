#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hegel/engine.hpp"

namespace hegel {

enum class Variant { Full, NoPrune, NoSimilarity, None };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(const std::string& s);
SynthesisConfig apply_variant(SynthesisConfig cfg, Variant v);

struct BenchSpec {
  std::string name;
  std::string libraryPath;
  std::string queryPath;
  int k = 3;
  std::vector<std::string> expected;  // acceptable solutions, compared up to α-renaming
  std::vector<Variant> ablations = {Variant::Full};
};

// Suite file: {"benchmarks": [{"name", "library", "query", "k", "expected", "ablations"}]};
// paths are relative to the suite file.
std::vector<BenchSpec> load_suite(const std::string& path);

// Binder-insensitive rendering of a solution (lets inlined, then re-normalized).
std::string alpha_key(const TermP& t);
bool matches_expected(const std::vector<TermP>& solutions, const std::vector<std::string>& expected);

struct BenchRow {
  std::string name;
  std::string variant;
  std::string outcome;  // SOLVED, BOTTOM, TIMEOUT, ERROR
  double seconds = 0;
  RunStats stats;
  std::vector<std::string> solutions;
  bool expectedMatched = true;
  std::string error;
};

// Runs one benchmark variant in a child process bounded by timeoutS.
BenchRow run_bench_item(const BenchSpec& b, Variant v, const SynthesisConfig& base,
                        const OracleConfig& ocfg, double timeoutS);

std::string bench_csv(const std::vector<BenchRow>& rows);
nlohmann::json bench_json(const std::vector<BenchRow>& rows);
// Ablation-chain violations: full <= noPrune <= none and full <= noSimilarity <= none.
std::vector<std::string> monotonicity_violations(const std::vector<BenchRow>& rows);

std::string read_file(const std::string& path);

// `synth ...` and `bench ...`; argv excludes the program name and subcommand.
int run_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hegel
