#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bitml/compiler.hpp"
#include "bitml/parser.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bitml;
namespace fs = std::filesystem;

namespace {

ContractSpec load(const std::string& name) {
  fs::path p = fs::path(BITML_CONTRACT_DIR) / name;
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_file({os.str(), p.string()}).spec;
}

// Resolves every input value (external from the spec, internal from the
// producing template) and checks each transaction burns exactly the fee.
void check_fee_conservation(const TxDag& dag, const ContractSpec& spec) {
  std::map<Outpoint, Satoshi> external;
  for (const auto& d : spec.precondition.persistent_deposits)
    external[d.outpoint] = d.value;
  for (const auto& d : spec.precondition.fee_deposits)
    external[d.outpoint] = d.value;

  for (const auto& t : dag.templates) {
    Satoshi in = 0;
    for (const auto& i : t.inputs) {
      if (const auto* op = std::get_if<Outpoint>(&i.source)) {
        REQUIRE(external.count(*op));
        in += external[*op];
      } else {
        const auto& ref = std::get<InternalRef>(i.source);
        const TxTemplate* parent = dag.find(ref.template_name);
        REQUIRE(parent != nullptr);
        REQUIRE(ref.index < parent->outputs.size());
        in += parent->outputs[ref.index].value;
      }
    }
    Satoshi out = 0;
    for (const auto& o : t.outputs) out += o.value;
    CAPTURE(t.name);
    CHECK(in - out == dag.fee_per_tx);
  }
}

ContractSpec many_party_spec(size_t n) {
  ContractSpec spec;
  for (size_t i = 0; i < n; ++i) {
    char c = char('a' + (i % 16));
    spec.participants.push_back(
        {"P" + std::to_string(i), "02" + std::string(64, c == 'a' + 15 ? 'f' : c)});
  }
  // distinct pubkeys: vary the last nibble
  for (size_t i = 0; i < n; ++i)
    spec.participants[i].pubkey[65] = "0123456789abcdef"[i % 16];
  spec.precondition.persistent_deposits = {
      {"P0", 100000, {std::string(64, '1'), 0}}};
  spec.precondition.fee_deposits = {{"P0", 50000, {std::string(64, '2'), 0}}};
  spec.contract.branches = {Branch{{}, Withdraw{"P0"}}};
  return spec;
}

}  // namespace

TEST_CASE("template counts per contract") {
  const std::pair<const char*, size_t> cases[] = {
      {"tiny-withdraw.bitml", 2},  {"mutual-tc.bitml", 8},
      {"mutual-tc-3.bitml", 11},   {"mutual-tc-4.bitml", 14},
      {"mutual-tc-5.bitml", 17},   {"four-secrets.bitml", 6},
      {"lottery-2p-zero.bitml", 8}, {"lottery-2p-collateral.bitml", 12},
  };
  for (const auto& [file, count] : cases) {
    CAPTURE(file);
    auto dag = compile(load(file));
    CHECK(dag.templates.size() == count);
    CHECK(dag.templates[0].name == "Tinit");
  }
}

TEST_CASE("Tinit locks all deposits under the root script") {
  auto spec = load("mutual-tc.bitml");
  auto dag = compile(spec);
  const auto& tinit = dag.templates[0];
  // 2 deposits + 2 fee deposits, all external
  REQUIRE(tinit.inputs.size() == 4);
  for (const auto& i : tinit.inputs) {
    CHECK(std::holds_alternative<Outpoint>(i.source));
    CHECK(i.redeem_script == nullptr);  // P2PKH spends
  }
  REQUIRE(tinit.outputs.size() == 1);
  CHECK(tinit.outputs[0].value ==
        spec.total_deposit_value() + spec.total_fee_value() - dag.fee_per_tx);
  CHECK(std::holds_alternative<P2SHPayout>(tinit.outputs[0].payout));
}

TEST_CASE("every transaction burns exactly the fee") {
  for (const char* file :
       {"tiny-withdraw.bitml", "mutual-tc.bitml", "mutual-tc-5.bitml",
        "lottery-2p-collateral.bitml", "four-secrets.bitml"}) {
    CAPTURE(file);
    auto spec = load(file);
    check_fee_conservation(compile(spec), spec);
  }
}

TEST_CASE("withdraw recipients collect the pot") {
  auto spec = load("mutual-tc.bitml");
  auto dag = compile(spec);
  // the timeout withdraw pays B everything left after its fee trail
  const TxTemplate* t = dag.find("T_1");
  REQUIRE(t != nullptr);
  REQUIRE(t->outputs.size() == 1);
  const auto& payout = std::get<P2PKHPayout>(t->outputs[0].payout);
  CHECK(payout.participant == "B");
  CHECK(t->locktime == 100000);
}

TEST_CASE("insufficient fees are rejected up front") {
  auto spec = load("bad-fees.bitml");
  try {
    compile(spec);
    FAIL("expected InsufficientFees");
  } catch (const InsufficientFees& e) {
    CHECK(e.required == 2000);  // 2 templates x 1000
    CHECK(e.available == 1500);
  }
  // a smaller fee rate makes the same contract compile
  CHECK(compile(spec, 500).templates.size() == 2);
}

TEST_CASE("singleton choices skip the selector") {
  auto spec = load("tiny-withdraw.bitml");
  auto script = script_of(spec.contract, {}, spec);
  REQUIRE(script != nullptr);
  CHECK_FALSE(std::holds_alternative<OrE>(script->node));

  auto tc = load("mutual-tc.bitml");
  auto root = script_of(tc.contract, {}, tc);
  const auto& orr = std::get<OrE>(root->node);
  CHECK(orr.branches.size() == 2);
  CHECK(orr.selector_slot == "sel");
}

TEST_CASE("reveal branch scripts check hash, pad and predicate") {
  auto spec = load("lottery-2p-zero.bitml");
  auto root = script_of(spec.contract, {}, spec);
  const auto& orr = std::get<OrE>(root->node);
  const auto& conj = std::get<AndE>(orr.branches[0]->node);

  bool sawMulti = false, sawPreimage = false, sawSize = false, sawCmp = false;
  for (const auto& term : conj.terms) {
    if (std::holds_alternative<CheckMultiAll>(term->node)) sawMulti = true;
    if (std::holds_alternative<PreimageHashEq>(term->node)) sawPreimage = true;
    if (const auto* sz = std::get_if<SizeGe>(&term->node)) {
      sawSize = true;
      CHECK(sz->min == kSecretPad);
    }
    if (std::holds_alternative<CmpLt>(term->node)) sawCmp = true;
  }
  CHECK(sawMulti);
  CHECK(sawPreimage);
  CHECK(sawSize);
  CHECK(sawCmp);
}

TEST_CASE("oversized choice flags standardness; flattened is clean") {
  auto big = compile(load("oversized-choice.bitml"));
  auto violations = check_standardness(big);
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].kind == StandardnessViolation::Kind::OversizedRedeemScript);
  CHECK(violations[0].location == "Tinit:output0");
  CHECK(violations[0].size > kMaxPushBytes);

  auto hints = suggest_flattening(load("oversized-choice.bitml"));
  REQUIRE_FALSE(hints.empty());
  CHECK(hints[0].node.empty());  // the root choice
  CHECK(hints[0].branch_count == 3);

  CHECK(check_standardness(compile(load("oversized-flattened.bitml"))).empty());
  CHECK(suggest_flattening(load("oversized-flattened.bitml")).empty());

  // strict mode turns the violation into an exception
  CHECK_THROWS_AS(compile(load("oversized-choice.bitml"), kDefaultFeePerTx, true),
                  StandardnessError);
}

TEST_CASE("16 cosigners exceed the multisig key cap") {
  auto ok = many_party_spec(15);
  CHECK(check_standardness(compile(ok)).empty());

  auto bad = many_party_spec(16);
  auto violations = check_standardness(compile(bad));
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].kind == StandardnessViolation::Kind::TooManyKeys);
  CHECK(violations[0].size == 16);
}

TEST_CASE("key references are deterministic and role-separated") {
  KeyRef a{"A", "0.1", 2, "sig"};
  KeyRef b{"A", "0.1", 2, "sig"};
  CHECK(a.id() == b.id());
  CHECK(a.id() != KeyRef{"A", "0.1", 2, "auth"}.id());
  CHECK(a.id() != KeyRef{"B", "0.1", 2, "sig"}.id());
  CHECK(a.id() != KeyRef{"A", "0.2", 2, "sig"}.id());
}

TEST_CASE("dag_to_json is stable and complete") {
  auto dag = compile(load("mutual-tc.bitml"));
  auto text = dag_to_json(dag);
  CHECK(dag_to_json(dag) == text);  // deterministic

  auto j = nlohmann::json::parse(text);
  REQUIRE(j.contains("templates"));
  CHECK(j["templates"].size() == 8);
  CHECK(j["templates"][0]["name"] == "Tinit");
  for (const auto& t : j["templates"]) {
    CHECK(t.contains("inputs"));
    CHECK(t.contains("outputs"));
  }
  REQUIRE(j.contains("edges"));
  // 7 non-Tinit templates each spend an internal output
  CHECK(j["edges"].size() >= 7);
  for (const auto& e : j["edges"]) {
    CHECK(dag.find(e["from"].get<std::string>()) != nullptr);
    CHECK(dag.find(e["to"].get<std::string>()) != nullptr);
  }
}

TEST_CASE("internal inputs declare their selected branch") {
  auto dag = compile(load("mutual-tc.bitml"));
  for (const auto& t : dag.templates) {
    if (t.name == "Tinit") continue;
    for (const auto& i : t.inputs) {
      CAPTURE(t.name);
      REQUIRE(i.redeem_script != nullptr);
      if (std::holds_alternative<OrE>(i.redeem_script->node))
        CHECK(i.selected_branch >= 0);
    }
  }
}
