#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bitml/parser.hpp"
#include "bitml/verifier.hpp"
#include "doctest.h"

using namespace bitml;
namespace fs = std::filesystem;

namespace {

ParsedFile load(const std::string& name) {
  fs::path p = fs::path(BITML_CONTRACT_DIR) / name;
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_file({os.str(), p.string()});
}

// Forward-DFS liquidity oracle: per state, search Guaranteed-only paths for
// a drained configuration. Intentionally different from the production
// backward-BFS.
bool liquid_by_forward_search(const StateGraph& g, Satoshi epsilon) {
  for (size_t s = 0; s < g.size(); ++s) {
    std::set<size_t> seen{s};
    std::deque<size_t> todo{s};
    bool ok = false;
    while (!todo.empty() && !ok) {
      size_t v = todo.front();
      todo.pop_front();
      if (g.states[v].active_balance() <= epsilon) {
        ok = true;
        break;
      }
      for (const auto& e : g.out[v])
        if (e.cls == MoveClass::Guaranteed && seen.insert(e.to).second)
          todo.push_back(e.to);
    }
    if (!ok) return false;
  }
  return true;
}

// Oracle for [] p: p must hold in every reachable state of every region.
bool globally_by_enumeration(const ContractSpec& spec,
                             const std::vector<Strategy>& strategies,
                             const LTLAtom& atom, bool negated) {
  for (const auto& lengths : sample_secret_regions(spec)) {
    auto ctx = SemanticsContext::make(spec, lengths);
    auto g = reachable_states(ctx, strategies);
    for (const auto& cfg : g.states)
      if (atom_holds(cfg, atom) == negated) return false;
  }
  return true;
}

void replay_witness(const ContractSpec& spec, const Witness& w) {
  auto ctx = SemanticsContext::make(spec, w.lengths);
  auto cfg = initial_configuration(ctx);
  for (const auto& m : w.prefix) cfg = apply_move(cfg, m, ctx);
  if (w.stutter_cycle) {
    CHECK(enumerate_moves(cfg, ctx).empty());
  } else if (!w.cycle.empty()) {
    auto start = cfg.key();
    for (const auto& m : w.cycle) cfg = apply_move(cfg, m, ctx);
    CHECK(cfg.key() == start);
  }
}

}  // namespace

TEST_CASE("move classification") {
  auto parsed = load("mutual-tc.bitml");
  auto ctx = SemanticsContext::make(parsed.spec, {{"a", 0}, {"b", 0}});
  auto cfg = initial_configuration(ctx);
  Move reveal{RevealSecret{"A", "a", 0}};

  CHECK(classify_move(Move{Delay{}}, {}, cfg, ctx) == MoveClass::Guaranteed);
  CHECK(classify_move(reveal, {}, cfg, ctx) == MoveClass::Adversarial);

  auto uncond = parse_strategies("(strategy \"A\" (do-reveal a))");
  CHECK(classify_move(reveal, uncond, cfg, ctx) == MoveClass::Guaranteed);

  auto cond =
      parse_strategies("(strategy \"A\" (do-reveal a) (if (revealed b)))");
  CHECK(classify_move(reveal, cond, cfg, ctx) == MoveClass::Prohibited);
  auto withB = apply_move(cfg, Move{RevealSecret{"B", "b", 0}}, ctx);
  CHECK(classify_move(reveal, cond, withB, ctx) == MoveClass::Guaranteed);

  // B has no strategy either way
  CHECK(classify_move(Move{RevealSecret{"B", "b", 0}}, uncond, cfg, ctx) ==
        MoveClass::Adversarial);
}

TEST_CASE("secret sample sets and regions") {
  auto four = load("four-secrets.bitml").spec;
  auto sets = secret_sample_sets(four);
  REQUIRE(sets.size() == 4);
  for (const auto& [name, s] : sets) {
    CAPTURE(name);
    CHECK(s == std::vector<int64_t>{0, 1, 2});
  }
  CHECK(sample_secret_regions(four).size() == 81);

  // no predicates anywhere -> single all-zero assignment
  auto tc = load("mutual-tc.bitml").spec;
  auto regions = sample_secret_regions(tc);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0] == std::map<std::string, int64_t>{{"a", 0}, {"b", 0}});

  // lottery: b compared against 2 and against len a -> shared {0,2,3}
  auto lot = load("lottery-2p-zero.bitml").spec;
  auto lsets = secret_sample_sets(lot);
  CHECK(lsets.at("a") == std::vector<int64_t>{0, 2, 3});
  CHECK(lsets.at("b") == std::vector<int64_t>{0, 2, 3});
  CHECK(sample_secret_regions(lot).size() == 9);
}

TEST_CASE("liquidity calibration verdicts") {
  auto tc = load("mutual-tc.bitml").spec;
  CHECK(check_liquidity(tc, {}).verdict);

  auto noafter = load("mutual-tc-noafter.bitml").spec;
  auto r = check_liquidity(noafter, {});
  CHECK_FALSE(r.verdict);
  REQUIRE(r.witness.has_value());

  auto uncond = parse_strategies("(strategy \"A\" (do-reveal a))");
  CHECK(check_liquidity(noafter, uncond).verdict);

  auto cond =
      parse_strategies("(strategy \"A\" (do-reveal a) (if (revealed b)))");
  CHECK_FALSE(check_liquidity(noafter, cond).verdict);
}

TEST_CASE("liquidity witness points at a frozen state") {
  auto noafter = load("mutual-tc-noafter.bitml").spec;
  auto r = check_liquidity(noafter, {});
  REQUIRE(r.witness.has_value());
  auto ctx = SemanticsContext::make(noafter, r.witness->lengths);
  auto cfg = initial_configuration(ctx);
  for (const auto& m : r.witness->prefix) cfg = apply_move(cfg, m, ctx);
  CHECK(cfg.active_balance() > 0);
  // no Guaranteed escape from here
  auto g = reachable_states(ctx, {});
  StateGraph frozen;  // reuse forward search seeded at this state only
  (void)frozen;
  std::set<std::string> seen{cfg.key()};
  std::deque<Configuration> todo{cfg};
  bool escape = false;
  while (!todo.empty() && !escape) {
    auto cur = todo.front();
    todo.pop_front();
    if (cur.active_balance() == 0) escape = true;
    for (const auto& m : enumerate_moves(cur, ctx)) {
      if (classify_move(m, {}, cur, ctx) != MoveClass::Guaranteed) continue;
      auto nxt = apply_move_unchecked(cur, m, ctx);
      if (seen.insert(nxt.key()).second) todo.push_back(nxt);
    }
  }
  CHECK_FALSE(escape);
}

TEST_CASE("liquidity agrees with the forward-search oracle") {
  struct Case {
    const char* file;
    const char* strategies;
  };
  const Case cases[] = {
      {"tiny-withdraw.bitml", ""},
      {"mutual-tc.bitml", ""},
      {"mutual-tc-noafter.bitml", ""},
      {"mutual-tc-noafter.bitml", "(strategy \"A\" (do-reveal a))"},
      {"mutual-tc-noafter.bitml",
       "(strategy \"A\" (do-reveal a) (if (revealed b)))"},
      {"four-secrets.bitml", ""},
      {"four-secrets.bitml",
       "(strategy \"A\" (do-reveal w))(strategy \"A\" (do-reveal x))"},
      {"lottery-2p-zero.bitml", ""},
      {"lottery-2p-collateral.bitml", ""},
      {"mutual-tc-3.bitml", ""},
      {"bad-fees.bitml", ""},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    CAPTURE(c.strategies);
    auto spec = load(c.file).spec;
    auto strategies = parse_strategies(c.strategies);
    bool expected = true;
    for (const auto& lengths : sample_secret_regions(spec)) {
      auto ctx = SemanticsContext::make(spec, lengths);
      auto g = reachable_states(ctx, strategies);
      if (!liquid_by_forward_search(g, 0)) {
        expected = false;
        break;
      }
    }
    CHECK(check_liquidity(spec, strategies).verdict == expected);
  }
}

TEST_CASE("epsilon loosens liquidity") {
  auto noafter = load("mutual-tc-noafter.bitml").spec;
  CHECK_FALSE(check_liquidity(noafter, {}, 0).verdict);
  // the whole pot may stay frozen; allowing that much is trivially liquid
  CHECK(check_liquidity(noafter, {}, noafter.total_deposit_value()).verdict);
}

TEST_CASE("LTL calibration verdicts") {
  auto parsed = load("mutual-tc.bitml");
  auto f1 = parse_ltl("[](a revealed => <>A has-deposit>= 100000000 satoshi)");
  auto f2 = parse_ltl(
      "[](a revealed => <>(b revealed \\/ A has-deposit>= 200000000 satoshi))");
  CHECK(check_ltl(parsed.spec, {}, f1).verdict);
  CHECK(check_ltl(parsed.spec, {}, f2).verdict);

  for (const auto& f : {f1, f2}) {
    auto r = check_ltl(parsed.spec, {}, lnot(f));
    CHECK_FALSE(r.verdict);
    REQUIRE(r.witness.has_value());
    replay_witness(parsed.spec, *r.witness);
  }

  auto r = check_ltl(parsed.spec, {}, parse_ltl("[] !(a revealed)"));
  CHECK_FALSE(r.verdict);
  REQUIRE(r.witness.has_value());
  bool sawReveal = false;
  for (const auto& m : r.witness->prefix)
    if (const auto* rv = std::get_if<RevealSecret>(&m))
      sawReveal |= rv->secret == "a";
  CHECK(sawReveal);
  replay_witness(parsed.spec, *r.witness);
}

TEST_CASE("globally-atom queries agree with exhaustive enumeration") {
  struct Case {
    const char* file;
    const char* formula;
    LTLAtom atom;
    bool negated;
  };
  const Case cases[] = {
      {"tiny-withdraw.bitml", "[] !(contract-terminated)", AtomTerminated{}, true},
      {"tiny-withdraw.bitml", "[] !(A has-deposit>= 1 satoshi)",
       AtomHasDeposit{"A", 1}, true},
      {"mutual-tc.bitml", "[] !(a revealed)", AtomRevealed{"a"}, true},
      {"mutual-tc.bitml", "[] !(B has-deposit>= 200000001 satoshi)",
       AtomHasDeposit{"B", 200000001}, true},
      {"four-secrets.bitml", "[] !(w revealed)", AtomRevealed{"w"}, true},
      {"lottery-2p-zero.bitml", "[] !(A has-deposit>= 200000001 satoshi)",
       AtomHasDeposit{"A", 200000001}, true},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    CAPTURE(c.formula);
    auto spec = load(c.file).spec;
    bool expected = globally_by_enumeration(spec, {}, c.atom, c.negated);
    auto r = check_ltl(spec, {}, parse_ltl(c.formula));
    CHECK(r.verdict == expected);
    if (!r.verdict) {
      REQUIRE(r.witness.has_value());
      replay_witness(spec, *r.witness);
    }
  }
}

TEST_CASE("double negation preserves verdicts") {
  auto spec = load("mutual-tc.bitml").spec;
  for (const char* text :
       {"[](a revealed => <>A has-deposit>= 100000000 satoshi)",
        "[] !(a revealed)", "<> contract-terminated"}) {
    CAPTURE(text);
    auto f = parse_ltl(text);
    CHECK(check_ltl(spec, {}, f).verdict ==
          check_ltl(spec, {}, lnot(lnot(f))).verdict);
  }
}

TEST_CASE("state limit triggers") {
  auto spec = load("mutual-tc.bitml").spec;
  CHECK_THROWS_AS(check_liquidity(spec, {}, 0, 5), StateLimitExceeded);
  CHECK_THROWS_AS(
      check_ltl(spec, {}, parse_ltl("[] !(a revealed)"), 5),
      StateLimitExceeded);
}

TEST_CASE("stats are populated") {
  auto spec = load("mutual-tc.bitml").spec;
  auto r = check_liquidity(spec, {});
  CHECK(r.stats.states_explored > 0);
  CHECK(r.stats.regions == 1);
  CHECK(r.stats.wall_seconds >= 0.0);
}
