// bitml: check, verify and compile contracts from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bitml/compiler.hpp"
#include "bitml/parser.hpp"
#include "bitml/txwire.hpp"
#include "bitml/verifier.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bitml;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitStatic = 2;
constexpr int kExitFalseVerdict = 3;
constexpr int kExitStateLimit = 4;
constexpr int kExitInsufficientFees = 5;
constexpr int kExitStandardness = 6;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

size_t default_state_limit() {
  if (const char* env = std::getenv("BITML_STATE_LIMIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return size_t(v);
  }
  return kDefaultStateLimit;
}

json static_errors_json(const std::vector<StaticError>& errors) {
  json out = json::array();
  for (const auto& e : errors)
    out.push_back(json{{"kind", to_string(e.kind)},
                       {"subject", e.subject},
                       {"message", e.message}});
  return out;
}

json witness_json(const Witness& w) {
  json lengths = json::object();
  for (const auto& [name, len] : w.lengths) lengths[name] = len;
  json prefix = json::array(), cycle = json::array();
  for (const auto& m : w.prefix) prefix.push_back(to_string(m));
  for (const auto& m : w.cycle) cycle.push_back(to_string(m));
  return json{{"lengths", lengths},
              {"prefix", prefix},
              {"cycle", cycle},
              {"stutter_cycle", w.stutter_cycle}};
}

struct Output {
  std::string format = "text";

  void emit(const json& report) const {
    if (format == "json") {
      std::cout << report.dump(2) << "\n";
      return;
    }
    if (report.contains("parse_error")) {
      const auto& e = report["parse_error"];
      std::cout << "parse error at " << e["line"] << ":" << e["column"] << ": "
                << e["message"].get<std::string>() << "\n";
      return;
    }
    for (const auto& e : report["static_errors"])
      std::cout << "static error: " << e["kind"].get<std::string>() << ": "
                << e["message"].get<std::string>() << "\n";
    if (report.contains("queries")) {
      for (const auto& q : report["queries"]) {
        std::cout << q["kind"].get<std::string>();
        if (q["kind"] == "ltl")
          std::cout << " " << q["formula"].get<std::string>();
        if (q.contains("error")) {
          std::cout << ": error: " << q["error"].get<std::string>() << "\n";
          continue;
        }
        std::cout << ": " << (q["verdict"].get<bool>() ? "true" : "false")
                  << " (" << q["stats"]["states"] << " states, "
                  << q["stats"]["regions"] << " regions)\n";
        if (!q["witness"].is_null()) {
          const auto& w = q["witness"];
          std::cout << "  counterexample lengths: " << w["lengths"].dump()
                    << "\n";
          for (const auto& m : w["prefix"])
            std::cout << "    " << m.get<std::string>() << "\n";
          if (!w["cycle"].empty()) {
            std::cout << "  cycle:\n";
            for (const auto& m : w["cycle"])
              std::cout << "    " << m.get<std::string>() << "\n";
          }
          if (w["stutter_cycle"].get<bool>())
            std::cout << "  (loops forever in the final state)\n";
        }
      }
    }
    if (report.contains("compile") && !report["compile"].is_null()) {
      const auto& c = report["compile"];
      if (c.contains("templates"))
        std::cout << "templates: " << c["templates"]
                  << ", total fees burned: " << c["fees_burned"]
                  << " satoshi\n";
      for (const auto& v : c["standardness"])
        std::cout << "standardness: " << v["kind"].get<std::string>() << " at "
                  << v["location"].get<std::string>() << " ("
                  << v["size"] << " bytes)\n";
      for (const auto& h : c["hints"])
        std::cout << "hint: " << h["message"].get<std::string>() << "\n";
      if (c.contains("error"))
        std::cout << "error: " << c["error"].get<std::string>() << "\n";
    }
    if (report["static_errors"].empty() && !report.contains("queries") &&
        (!report.contains("compile") || report["compile"].is_null()))
      std::cout << "ok\n";
  }
};

// Parses and statically checks; returns nonzero exit code on failure.
int load(const std::string& path, const Output& out, ParsedFile& parsed,
         json& report) {
  report["file"] = path;
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  try {
    parsed = parse_file({std::move(text), path});
  } catch (const ParseError& e) {
    report["parse_error"] = json{{"line", e.line},
                                 {"column", e.column},
                                 {"message", e.reason}};
    report["static_errors"] = json::array();
    report["exit_code"] = kExitParse;
    out.emit(report);
    return kExitParse;
  }
  auto errors = check_static(parsed.spec);
  auto flow = check_value_flow(parsed.spec);
  errors.insert(errors.end(), flow.begin(), flow.end());
  report["static_errors"] = static_errors_json(errors);
  if (!errors.empty()) {
    report["exit_code"] = kExitStatic;
    out.emit(report);
    return kExitStatic;
  }
  return kExitOk;
}

std::vector<Strategy> merge_strategies(std::vector<Strategy> base,
                                       const std::vector<Strategy>& cli) {
  for (const auto& s : cli) {
    auto it = std::find_if(
        base.begin(), base.end(),
        [&](const Strategy& x) { return x.participant == s.participant; });
    if (it == base.end())
      base.push_back(s);
    else
      *it = s;  // command line wins
  }
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BitML contract toolchain"};
  app.require_subcommand(1);

  std::string file;
  std::string format = "text";

  auto* check = app.add_subcommand("check", "parse and statically check");
  check->add_option("file", file)->required();
  check->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));

  bool liquidity = false;
  Satoshi epsilon = 0;
  std::vector<std::string> ltlQueries, strategyTexts;
  std::string strategyFile;
  size_t stateLimit = 0;

  auto* verify = app.add_subcommand("verify", "verify liquidity / LTL queries");
  verify->add_option("file", file)->required();
  verify->add_flag("--liquidity", liquidity);
  verify->add_option("--epsilon", epsilon);
  verify->add_option("--ltl", ltlQueries);
  verify->add_option("--strategy", strategyTexts);
  verify->add_option("--strategy-file", strategyFile);
  verify->add_option("--state-limit", stateLimit);
  verify->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));

  std::string outDir;
  Satoshi feePerTx = kDefaultFeePerTx;
  bool allowNonstandard = false;
  std::vector<std::string> secretArgs;

  auto* compileCmd = app.add_subcommand("compile", "compile to transactions");
  compileCmd->add_option("file", file)->required();
  compileCmd->add_option("-o,--out", outDir)->required();
  compileCmd->add_option("--fee-per-tx", feePerTx);
  compileCmd->add_flag("--allow-nonstandard", allowNonstandard);
  compileCmd->add_option("--secret", secretArgs,
                         "name=hex preimage for txs.hex instantiation");
  compileCmd->add_option("--format", format)
      ->check(CLI::IsMember({"json", "text"}));

  CLI11_PARSE(app, argc, argv);

  Output out{format};
  json report;
  ParsedFile parsed;

  if (check->parsed()) {
    report["command"] = "check";
    if (int rc = load(file, out, parsed, report)) return rc;
    report["exit_code"] = kExitOk;
    out.emit(report);
    return kExitOk;
  }

  if (verify->parsed()) {
    report["command"] = "verify";
    if (int rc = load(file, out, parsed, report)) return rc;

    std::vector<Strategy> cliStrategies;
    try {
      if (!strategyFile.empty())
        cliStrategies = parse_strategies(read_file(strategyFile));
      for (const auto& text : strategyTexts) {
        for (const auto& s : parse_strategies(text))
          cliStrategies = merge_strategies(std::move(cliStrategies), {s});
      }
    } catch (const ParseError& e) {
      report["parse_error"] = json{{"line", e.line},
                                   {"column", e.column},
                                   {"message", e.reason}};
      report["exit_code"] = kExitParse;
      out.emit(report);
      return kExitParse;
    }
    auto strategies = merge_strategies(parsed.strategies, cliStrategies);

    std::vector<Query> queries;
    if (liquidity || !ltlQueries.empty()) {
      if (liquidity) queries.push_back({Query::Kind::Liquidity, ""});
      for (const auto& q : ltlQueries) queries.push_back({Query::Kind::Ltl, q});
    } else {
      queries = parsed.queries;
    }
    if (queries.empty()) {
      std::cerr << "verify needs --liquidity, --ltl or in-file queries\n";
      return kExitParse;
    }

    size_t limit = stateLimit > 0 ? stateLimit : default_state_limit();
    bool anyFalse = false, limitHit = false;
    json jqueries = json::array();
    for (const auto& q : queries) {
      json jq;
      jq["kind"] = q.kind == Query::Kind::Liquidity ? "liquidity" : "ltl";
      if (q.kind == Query::Kind::Ltl) jq["formula"] = q.formula;
      if (q.kind == Query::Kind::Liquidity) jq["epsilon"] = epsilon;
      try {
        VerificationResult r;
        if (q.kind == Query::Kind::Liquidity) {
          r = check_liquidity(parsed.spec, strategies, epsilon, limit);
        } else {
          LTLPtr formula = parse_ltl(q.formula);
          r = check_ltl(parsed.spec, strategies, formula, limit);
        }
        jq["verdict"] = r.verdict;
        jq["witness"] = r.witness ? witness_json(*r.witness) : json(nullptr);
        jq["stats"] = json{{"states", r.stats.states_explored},
                           {"regions", r.stats.regions},
                           {"wall_time", r.stats.wall_seconds}};
        anyFalse = anyFalse || !r.verdict;
      } catch (const StateLimitExceeded& e) {
        jq["error"] = e.what();
        limitHit = true;
      } catch (const ParseError& e) {
        jq["error"] = std::string("formula parse error: ") + e.reason;
        report["queries"] = jqueries;
        report["exit_code"] = kExitParse;
        out.emit(report);
        return kExitParse;
      }
      jqueries.push_back(std::move(jq));
    }
    report["queries"] = std::move(jqueries);
    int rc = limitHit ? kExitStateLimit
                      : (anyFalse ? kExitFalseVerdict : kExitOk);
    report["exit_code"] = rc;
    out.emit(report);
    return rc;
  }

  // compile
  report["command"] = "compile";
  if (int rc = load(file, out, parsed, report)) return rc;

  std::map<std::string, Bytes> preimages;
  for (const auto& arg : secretArgs) {
    auto eq = arg.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--secret expects name=hex\n";
      return kExitParse;
    }
    try {
      preimages[arg.substr(0, eq)] = from_hex(arg.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "--secret expects name=hex\n";
      return kExitParse;
    }
  }

  json jc;
  jc["fee_per_tx"] = feePerTx;
  int rc = kExitOk;
  fs::create_directories(outDir);
  try {
    TxDag dag = compile(parsed.spec, feePerTx);
    auto violations = check_standardness(dag);
    jc["templates"] = dag.templates.size();
    jc["fees_burned"] = feePerTx * Satoshi(dag.templates.size());
    jc["total_fee_input"] = dag.total_fee_input;
    json jv = json::array();
    for (const auto& v : violations)
      jv.push_back(json{{"kind", to_string(v.kind)},
                        {"location", v.location},
                        {"size", v.size},
                        {"message", v.message}});
    jc["standardness"] = std::move(jv);
    json jh = json::array();
    if (!violations.empty())
      for (const auto& h : suggest_flattening(parsed.spec))
        jh.push_back(json{{"node", path_to_string(h.node)},
                          {"branches", h.branch_count},
                          {"script_bytes", h.script_bytes},
                          {"message", h.message}});
    jc["hints"] = std::move(jh);

    {
      std::ofstream f(fs::path(outDir) / "dag.json", std::ios::binary);
      f << dag_to_json(dag);
    }
    if (violations.empty()) {
      TestSigner signer;
      auto txs = finalize(dag, signer, preimages);
      std::ofstream f(fs::path(outDir) / "txs.hex", std::ios::binary);
      for (const auto& tx : txs) f << to_hex(serialize(tx)) << "\n";
      jc["transactions"] = txs.size();
    } else if (!allowNonstandard) {
      rc = kExitStandardness;
    }
  } catch (const InsufficientFees& e) {
    jc["error"] = e.what();
    jc["standardness"] = json::array();
    jc["hints"] = json::array();
    rc = kExitInsufficientFees;
  }
  report["compile"] = std::move(jc);
  report["exit_code"] = rc;
  out.emit(report);
  {
    std::ofstream f(fs::path(outDir) / "report.json", std::ios::binary);
    if (f) f << report.dump(2) << "\n";
  }
  return rc;
}
