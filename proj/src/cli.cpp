#include "hegel/cli.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hegel/check.hpp"

namespace hegel {

namespace fs = std::filesystem;

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoPrune: return "noPrune";
    case Variant::NoSimilarity: return "noSimilarity";
    case Variant::None: return "none";
  }
  return "?";
}

std::optional<Variant> parse_variant(const std::string& s) {
  for (Variant v : {Variant::Full, Variant::NoPrune, Variant::NoSimilarity, Variant::None})
    if (variant_name(v) == s) return v;
  return std::nullopt;
}

SynthesisConfig apply_variant(SynthesisConfig cfg, Variant v) {
  cfg.pruneEnabled = v == Variant::Full || v == Variant::NoSimilarity;
  cfg.similarityEnabled = v == Variant::Full || v == Variant::NoPrune;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<BenchSpec> load_suite(const std::string& path) {
  auto j = nlohmann::json::parse(read_file(path));
  fs::path dir = fs::path(path).parent_path();
  std::vector<BenchSpec> out;
  for (auto& b : j.at("benchmarks")) {
    BenchSpec s;
    s.name = b.at("name").get<std::string>();
    s.libraryPath = (dir / b.at("library").get<std::string>()).string();
    s.queryPath = (dir / b.at("query").get<std::string>()).string();
    s.k = b.value("k", 3);
    if (s.k < 1) throw std::runtime_error(s.name + ": k must be at least 1");
    if (b.contains("expected")) s.expected = b["expected"].get<std::vector<std::string>>();
    if (b.contains("ablations")) {
      s.ablations.clear();
      for (auto& a : b["ablations"]) {
        auto v = parse_variant(a.get<std::string>());
        if (!v) throw std::runtime_error(s.name + ": unknown variant " + a.get<std::string>());
        s.ablations.push_back(*v);
      }
    }
    for (auto* p : {&s.libraryPath, &s.queryPath})
      if (!fs::exists(*p)) throw std::runtime_error(s.name + ": missing file " + *p);
    out.push_back(std::move(s));
  }
  return out;
}

std::string alpha_key(const TermP& t) {
  return pretty(canonical_binders(to_anf(inline_lets(t))));
}

bool matches_expected(const std::vector<TermP>& solutions, const std::vector<std::string>& expected) {
  if (expected.empty()) return true;
  std::set<std::string> keys;
  for (auto& s : solutions) keys.insert(alpha_key(s));
  for (auto& e : expected)
    if (keys.count(alpha_key(parse_term(e)))) return true;
  return false;
}

// ---------------------------------------------------------------- bench

namespace {

nlohmann::json row_json(const BenchRow& r) {
  return {{"name", r.name},         {"variant", r.variant},     {"outcome", r.outcome},
          {"seconds", r.seconds},   {"stats", stats_json(r.stats)}, {"solutions", r.solutions},
          {"expectedMatched", r.expectedMatched}, {"error", r.error}};
}

RunStats stats_from_json(const nlohmann::json& j) {
  RunStats s;
  s.statesBeforeMin = j.at("statesBeforeMin");
  s.statesAfterMin = j.at("statesAfterMin");
  s.transitionsMerged = j.at("transitionsMerged");
  s.transitionsPruned = j.at("transitionsPruned");
  s.pairsRecorded = j.at("pairsRecorded");
  s.smtQueries = j.at("smtQueries");
  s.cacheHits = j.at("cacheHits");
  s.unknowns = j.at("unknowns");
  s.termsEnumerated = j.at("termsEnumerated");
  s.rounds = j.at("rounds");
  s.discrepancies = j.at("discrepancies").get<std::vector<std::string>>();
  auto& w = j.at("wallMillis");
  s.wallMillis = {w.at("construct"), w.at("prune"),  w.at("similarity"),
                  w.at("minimize"),  w.at("nempty"), w.at("extract")};
  s.smtMillis = w.at("smt");
  return s;
}

BenchRow run_in_process(const BenchSpec& b, Variant v, const SynthesisConfig& base,
                        const OracleConfig& ocfg) {
  BenchRow row;
  row.name = b.name;
  row.variant = variant_name(v);
  auto t0 = std::chrono::steady_clock::now();
  try {
    Library lib = parse_library(read_file(b.libraryPath));
    Query q = parse_query(read_file(b.queryPath), &lib);
    SynthesisConfig cfg = apply_variant(base, v);
    cfg.k = b.k;
    Oracle oracle(ocfg);
    SynthesisResult r = lta_synthesize(lib, q, cfg, oracle);
    row.stats = r.stats;
    row.outcome = r.solved ? "SOLVED" : "BOTTOM";
    for (auto& t : r.terms) row.solutions.push_back(pretty(t));
    row.expectedMatched = matches_expected(r.terms, b.expected);
  } catch (const std::exception& e) {
    row.outcome = "ERROR";
    row.error = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

BenchRow run_bench_item(const BenchSpec& b, Variant v, const SynthesisConfig& base,
                        const OracleConfig& ocfg, double timeoutS) {
  int fds[2];
  if (pipe(fds) != 0) return run_in_process(b, v, base, ocfg);
  std::cout.flush();
  std::cerr.flush();
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return run_in_process(b, v, base, ocfg);
  }
  if (pid == 0) {
    close(fds[0]);
    std::string s = row_json(run_in_process(b, v, base, ocfg)).dump();
    size_t off = 0;
    while (off < s.size()) {
      ssize_t n = write(fds[1], s.data() + off, s.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
    close(fds[1]);
    _exit(0);
  }
  close(fds[1]);
  auto t0 = std::chrono::steady_clock::now();
  auto deadline = t0 + std::chrono::duration<double>(timeoutS);
  std::string data;
  bool timedOut = false;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      timedOut = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int rc = poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) continue;
    char buf[4096];
    ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    data.append(buf, static_cast<size_t>(n));
  }
  close(fds[0]);
  if (timedOut) kill(pid, SIGKILL);
  waitpid(pid, nullptr, 0);

  BenchRow row;
  row.name = b.name;
  row.variant = variant_name(v);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (timedOut) {
    row.outcome = "TIMEOUT";
    return row;
  }
  try {
    auto j = nlohmann::json::parse(data);
    row.outcome = j.at("outcome");
    row.seconds = j.at("seconds");
    row.stats = stats_from_json(j.at("stats"));
    row.solutions = j.at("solutions").get<std::vector<std::string>>();
    row.expectedMatched = j.at("expectedMatched");
    row.error = j.at("error");
  } catch (const std::exception& e) {
    row.outcome = "ERROR";
    row.error = std::string("worker died: ") + e.what();
  }
  return row;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "name,variant,outcome,seconds,statesBefore,statesAfter,transitionsMerged,smtQueries,"
        "termsEnumerated\n";
  for (auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.seconds);
    os << r.name << "," << r.variant << "," << r.outcome << "," << secs << ","
       << r.stats.statesBeforeMin << "," << r.stats.statesAfterMin << ","
       << r.stats.transitionsMerged << "," << r.stats.smtQueries << "," << r.stats.termsEnumerated
       << "\n";
  }
  return os.str();
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json j;
  j["schema"] = 1;
  j["rows"] = nlohmann::json::array();
  for (auto& r : rows) j["rows"].push_back(row_json(r));
  return j;
}

std::vector<std::string> monotonicity_violations(const std::vector<BenchRow>& rows) {
  std::map<std::string, std::map<std::string, std::uint64_t>> terms;
  for (auto& r : rows)
    if (r.outcome == "SOLVED" || r.outcome == "BOTTOM") terms[r.name][r.variant] = r.stats.termsEnumerated;
  std::vector<std::string> out;
  auto le = [&](const std::string& name, const std::map<std::string, std::uint64_t>& m,
                const std::string& a, const std::string& b) {
    if (!m.count(a) || !m.count(b)) return;
    if (m.at(a) > m.at(b))
      out.push_back(name + ": " + a + " (" + std::to_string(m.at(a)) + ") > " + b + " (" +
                    std::to_string(m.at(b)) + ")");
  };
  for (auto& [name, m] : terms) {
    le(name, m, "full", "noPrune");
    le(name, m, "noPrune", "none");
    le(name, m, "full", "noSimilarity");
    le(name, m, "noSimilarity", "none");
    if (!m.count("noPrune") && !m.count("noSimilarity")) le(name, m, "full", "none");
  }
  return out;
}

// ---------------------------------------------------------------- commands

namespace {

std::vector<std::string> reversed(std::vector<std::string> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path);
  o << text;
}

std::string smt_command(const std::string& flag) {
  if (const char* e = std::getenv("HEGEL_SMT_CMD"); e && *e) return e;
  return flag.empty() ? "z3 -in" : flag;
}

}  // namespace

int run_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize programs for a refinement-typed query", "hegel synth"};
  std::string libPath, queryPath, smtCmd, dumpPath, jsonPath;
  SynthesisConfig cfg;
  bool noPrune = false, noSim = false, noIf = false;
  app.add_option("--lib", libPath, "library file")->required();
  app.add_option("--query", queryPath, "query file")->required();
  app.add_option("--k", cfg.k, "bound on library calls");
  app.add_flag("--no-prune", noPrune, "disable pruning");
  app.add_flag("--no-similarity", noSim, "disable similarity merging");
  app.add_flag("--no-conditionals", noIf, "do not synthesize if-then-else");
  app.add_option("--max-terms", cfg.maxTerms, "solution cap");
  app.add_option("--smt-cmd", smtCmd, "SMT-LIB2 solver command");
  app.add_option("--smt-timeout-ms", cfg.smtTimeoutMs, "per-query solver timeout");
  app.add_option("--dump-lta", dumpPath, "write the final automaton (.dot for DOT, text otherwise)");
  app.add_option("--json", jsonPath, "write run statistics as JSON");
  try {
    auto rev = reversed(args);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  cfg.pruneEnabled = !noPrune;
  cfg.similarityEnabled = !noSim;
  cfg.conditionals = !noIf;
  try {
    cfg.validate();
    if (cfg.k > 64) throw ConfigError("k is unreasonably large");
    Library lib = parse_library(read_file(libPath));
    Query q = parse_query(read_file(queryPath), &lib);
    OracleConfig ocfg;
    ocfg.smtCmd = smt_command(smtCmd);
    ocfg.timeoutMs = cfg.smtTimeoutMs;
    Oracle oracle(ocfg);
    SynthesisResult r = lta_synthesize(lib, q, cfg, oracle);
    if (r.solved)
      for (auto& t : r.terms) out << pretty(t) << "\n";
    else
      out << "BOTTOM\n";
    for (auto& d : r.stats.discrepancies) err << "discrepancy: " << d << "\n";
    if (!dumpPath.empty())
      write_text(dumpPath, fs::path(dumpPath).extension() == ".dot" ? dump_dot(r.automaton)
                                                                   : dump_text(r.automaton));
    if (!jsonPath.empty()) {
      auto j = stats_json(r.stats);
      j["outcome"] = r.solved ? "SOLVED" : "BOTTOM";
      j["solutions"] = nlohmann::json::array();
      for (auto& t : r.terms) j["solutions"].push_back(pretty(t));
      write_text(jsonPath, j.dump(2) + "\n");
    }
    return r.solved ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run a benchmark suite under ablation variants", "hegel bench"};
  std::string suitePath, smtCmd, csvPath, jsonPath, variantsArg;
  double timeoutS = 180;
  SynthesisConfig cfg;
  app.add_option("--suite", suitePath, "suite file (JSON)")->required();
  app.add_option("--variants", variantsArg, "comma-separated: full,noPrune,noSimilarity,none");
  app.add_option("--timeout-s", timeoutS, "per-benchmark timeout in seconds");
  app.add_option("--max-terms", cfg.maxTerms, "solution cap");
  app.add_option("--smt-cmd", smtCmd, "SMT-LIB2 solver command");
  app.add_option("--smt-timeout-ms", cfg.smtTimeoutMs, "per-query solver timeout");
  app.add_option("--csv", csvPath, "write the table as CSV (default: stdout)");
  app.add_option("--json", jsonPath, "write the table as JSON");
  try {
    auto rev = reversed(args);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    cfg.validate();
    std::vector<Variant> forced;
    if (!variantsArg.empty()) {
      std::stringstream ss(variantsArg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = parse_variant(item);
        if (!v) throw ConfigError("unknown variant " + item);
        forced.push_back(*v);
      }
    }
    OracleConfig ocfg;
    ocfg.smtCmd = smt_command(smtCmd);
    ocfg.timeoutMs = cfg.smtTimeoutMs;
    std::vector<BenchRow> rows;
    for (auto& b : load_suite(suitePath))
      for (Variant v : forced.empty() ? b.ablations : forced)
        rows.push_back(run_bench_item(b, v, cfg, ocfg, timeoutS));

    std::string csv = bench_csv(rows);
    if (csvPath.empty()) out << csv;
    else write_text(csvPath, csv);
    if (!jsonPath.empty()) write_text(jsonPath, bench_json(rows).dump(2) + "\n");

    bool ok = true;
    for (auto& v : monotonicity_violations(rows)) {
      err << "monotonicity violation: " << v << "\n";
      ok = false;
    }
    for (auto& r : rows) {
      if (r.outcome == "ERROR") {
        err << r.name << "/" << r.variant << ": " << r.error << "\n";
        ok = false;
      }
      if (r.outcome == "SOLVED" && !r.expectedMatched) {
        err << r.name << "/" << r.variant << ": no expected solution among results\n";
        ok = false;
      }
      for (auto& d : r.stats.discrepancies) {
        err << r.name << "/" << r.variant << ": discrepancy: " << d << "\n";
        ok = false;
      }
      if (r.stats.statesBeforeMin > 0 && r.variant == "full") {
        double ratio = 1.0 - static_cast<double>(r.stats.statesAfterMin) /
                                 static_cast<double>(r.stats.statesBeforeMin);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f%%", 100 * ratio);
        err << r.name << ": state reduction " << buf << "\n";
      }
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const char* usage =
      "usage: hegel synth --lib FILE --query FILE [--k N] [options]\n"
      "       hegel bench --suite FILE [--variants LIST] [options]\n"
      "run `hegel synth --help` or `hegel bench --help` for options\n";
  if (args.empty()) {
    err << usage;
    return 2;
  }
  std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "synth") return run_synth(rest, out, err);
  if (args[0] == "bench") return run_bench(rest, out, err);
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return 0;
  }
  err << "unknown command '" << args[0] << "'\n" << usage;
  return 2;
}

}  // namespace hegel
