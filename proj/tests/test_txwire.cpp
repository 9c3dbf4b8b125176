#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "bitml/parser.hpp"
#include "bitml/txwire.hpp"
#include "dag_check.hpp"
#include "doctest.h"

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

RawTx random_tx(std::mt19937& rng) {
  std::uniform_int_distribution<int> nio(1, 5);
  std::uniform_int_distribution<int> scriptLen(0, 300);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int64_t> value(0, 2100000000000000LL);
  std::uniform_int_distribution<uint32_t> u32(0, 0xFFFFFFFFu);

  RawTx tx;
  tx.version = u32(rng) % 3;
  tx.locktime = u32(rng) % 2 ? 0 : u32(rng);
  int nin = nio(rng), nout = nio(rng);
  for (int i = 0; i < nin; ++i) {
    TxIn in;
    for (auto& b : in.prev_txid) b = uint8_t(byte(rng));
    in.prev_vout = u32(rng) % 10;
    in.sequence = u32(rng);
    int n = scriptLen(rng);
    in.script_sig.resize(n);
    for (auto& b : in.script_sig) b = uint8_t(byte(rng));
    tx.inputs.push_back(std::move(in));
  }
  for (int i = 0; i < nout; ++i) {
    TxOut out;
    out.value = value(rng);
    int n = scriptLen(rng);
    out.script_pubkey.resize(n);
    for (auto& b : out.script_pubkey) b = uint8_t(byte(rng));
    tx.outputs.push_back(std::move(out));
  }
  return tx;
}

}  // namespace

TEST_CASE("scriptnum golden encodings") {
  CHECK(scriptnum_encode(0) == Bytes{});
  CHECK(scriptnum_encode(1) == Bytes{0x01});
  CHECK(scriptnum_encode(-1) == Bytes{0x81});
  CHECK(scriptnum_encode(127) == Bytes{0x7f});
  CHECK(scriptnum_encode(128) == Bytes{0x80, 0x00});
  CHECK(scriptnum_encode(-128) == Bytes{0x80, 0x80});
  CHECK(scriptnum_encode(255) == Bytes{0xff, 0x00});
  CHECK(scriptnum_encode(256) == Bytes{0x00, 0x01});
  CHECK(scriptnum_encode(-255) == Bytes{0xff, 0x80});
  CHECK(scriptnum_encode(100000) == Bytes{0xa0, 0x86, 0x01});
}

TEST_CASE("scriptnum round trips") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int64_t> dist(-1'000'000'000'000LL,
                                              1'000'000'000'000LL);
  for (int i = 0; i < 5000; ++i) {
    int64_t v = dist(rng);
    CHECK(scriptnum_decode(scriptnum_encode(v)) == v);
  }
  for (int64_t v : {int64_t(0), int64_t(-1), int64_t(1), int64_t(127),
                    int64_t(-128), int64_t(32767), int64_t(-32768)})
    CHECK(scriptnum_decode(scriptnum_encode(v)) == v);
}

TEST_CASE("serialization golden bytes") {
  RawTx tx;
  tx.version = 2;
  TxIn in;
  in.prev_txid.fill(0x11);
  in.prev_vout = 1;
  in.script_sig = {0x51};
  in.sequence = 0xFFFFFFFF;
  tx.inputs.push_back(in);
  TxOut out;
  out.value = 0x0102030405060708;
  out.script_pubkey = {0xac};
  tx.outputs.push_back(out);
  tx.locktime = 0;

  // hand-assembled legacy wire bytes
  Bytes expected;
  auto append = [&](std::initializer_list<uint8_t> b) {
    expected.insert(expected.end(), b);
  };
  append({0x02, 0x00, 0x00, 0x00});  // version LE
  append({0x01});                    // input count
  expected.insert(expected.end(), 32, 0x11);  // prev txid
  append({0x01, 0x00, 0x00, 0x00});  // vout LE
  append({0x01, 0x51});              // script length + script
  append({0xff, 0xff, 0xff, 0xff});  // sequence
  append({0x01});                    // output count
  append({0x08, 0x07, 0x06, 0x05, 0x04, 0x03, 0x02, 0x01});  // value LE
  append({0x01, 0xac});              // script length + script
  append({0x00, 0x00, 0x00, 0x00});  // locktime

  CHECK(serialize(tx) == expected);
  CHECK(deserialize(expected) == tx);
}

TEST_CASE("txid is double sha256 in internal order, reversed for display") {
  RawTx tx;
  tx.outputs.push_back({42, {0x51}});
  Bytes wire = serialize(tx);
  Hash256 once = sha256(wire);
  Hash256 expected = sha256(Bytes(once.begin(), once.end()));
  CHECK(txid(tx) == expected);

  std::string disp = txid_hex(tx);
  auto raw = to_hex(txid(tx));
  REQUIRE(disp.size() == 64);
  for (int i = 0; i < 32; ++i) {
    CHECK(disp.substr(2 * i, 2) == raw.substr(62 - 2 * i, 2));
  }
}

TEST_CASE("1000 structured-random transactions round trip") {
  std::mt19937 rng(20260823);
  for (int i = 0; i < 1000; ++i) {
    RawTx tx = random_tx(rng);
    Bytes wire = serialize(tx);
    CHECK(deserialize(wire) == tx);
  }
}

TEST_CASE("deserialize rejects malformed bytes") {
  RawTx tx;
  tx.outputs.push_back({1, {0x51, 0x51}});
  Bytes wire = serialize(tx);

  Bytes trailing = wire;
  trailing.push_back(0x00);
  CHECK_THROWS_AS(deserialize(trailing), MalformedBytes);

  for (size_t cut = 0; cut < wire.size(); ++cut) {
    Bytes truncated(wire.begin(), wire.begin() + cut);
    CHECK_THROWS_AS(deserialize(truncated), MalformedBytes);
  }
  CHECK_THROWS_AS(deserialize(Bytes{}), MalformedBytes);
}

TEST_CASE("sighash blanks other inputs and commits to the script code") {
  std::mt19937 rng(3);
  RawTx tx = random_tx(rng);
  while (tx.inputs.size() < 2) tx.inputs.push_back(tx.inputs[0]);
  Bytes code{0x76, 0xa9};

  Hash256 base = sighash_all(tx, 0, code);

  // other input scripts do not matter
  RawTx mutated = tx;
  mutated.inputs[1].script_sig = {0xde, 0xad, 0xbe, 0xef};
  CHECK(sighash_all(mutated, 0, code) == base);

  // the signed input's own embedded script does not matter either
  mutated = tx;
  mutated.inputs[0].script_sig = {0x99};
  CHECK(sighash_all(mutated, 0, code) == base);

  // but outputs, code and index all do
  mutated = tx;
  mutated.outputs[0].value ^= 1;
  CHECK(sighash_all(mutated, 0, code) != base);
  CHECK(sighash_all(tx, 0, Bytes{0x76}) != base);
  CHECK(sighash_all(tx, 1, code) != base);
  CHECK_THROWS_AS(sighash_all(tx, tx.inputs.size(), code), IndexOutOfRange);
}

TEST_CASE("test signer round trip") {
  TestSigner signer;
  KeyRef key{"A", "0", 1, "sig"};
  Hash256 digest = sha256(Bytes{1, 2, 3});

  Bytes pk = signer.pubkey(key);
  REQUIRE(pk.size() == 33);
  CHECK(pk[0] == 0x02);
  CHECK(pk == derive_pubkey(key));

  Bytes sig = signer.sign(key, digest);
  CHECK(sig.back() == 0x01);  // hashtype byte
  CHECK(TestSigner::verify(pk, sig, digest));

  Hash256 other = sha256(Bytes{9});
  CHECK_FALSE(TestSigner::verify(pk, sig, other));
  CHECK_FALSE(TestSigner::verify(derive_pubkey({"B", "0", 1, "sig"}), sig, digest));
  Bytes bad = sig;
  bad[0] ^= 1;
  CHECK_FALSE(TestSigner::verify(pk, bad, digest));
}

TEST_CASE("assembled script goldens") {
  CHECK(assemble_script(ScriptExpr{TrueE{}}) == Bytes{0x51});

  // every top-level conjunct ends with VERIFY-style checks and a final OP_1
  KeyRef key{"A", "", 0, "sig"};
  Bytes cs = assemble_script(ScriptExpr{CheckSig{"s", key}});
  REQUIRE(cs.size() == 37);
  CHECK(cs[0] == 33);  // direct push of the pubkey
  CHECK(Bytes(cs.begin() + 1, cs.begin() + 34) == derive_pubkey(key));
  CHECK(cs[34] == 0xac);  // OP_CHECKSIG
  CHECK(cs[35] == 0x69);  // OP_VERIFY
  CHECK(cs[36] == 0x51);  // OP_1

  Hash256 h = sha256(Bytes{1});
  Bytes pre = assemble_script(ScriptExpr{PreimageHashEq{"p", h}});
  REQUIRE(pre.size() == 38);
  CHECK(pre[0] == 0x82);  // OP_SIZE (length stashed for later use)
  CHECK(pre[1] == 0x6b);  // OP_TOALTSTACK
  CHECK(pre[2] == 0xa8);  // OP_SHA256
  CHECK(pre[3] == 32);
  CHECK(Bytes(pre.begin() + 4, pre.begin() + 36) == Bytes(h.begin(), h.end()));
  CHECK(pre[36] == 0x88);  // OP_EQUALVERIFY
  CHECK(pre[37] == 0x51);  // OP_1

  // 2-of-2 all-sign multisig, no dummy element
  CheckMultiAll multi;
  multi.slots = {"s0", "s1"};
  multi.keys = {{"A", "", 0, "sig"}, {"B", "", 0, "sig"}};
  Bytes ms = assemble_script(ScriptExpr{multi});
  REQUIRE(ms.size() == 73);
  CHECK(ms[0] == 0x52);   // OP_2 required signatures
  CHECK(ms[69] == 0x52);  // OP_2 key count
  CHECK(ms[70] == 0xae);  // OP_CHECKMULTISIG
  CHECK(ms[71] == 0x69);
  CHECK(ms[72] == 0x51);
}

TEST_CASE("oversized pushes and key lists are rejected") {
  CheckMultiAll multi;
  for (int i = 0; i < 16; ++i) {
    multi.slots.push_back("s" + std::to_string(i));
    multi.keys.push_back({"P" + std::to_string(i), "", 0, "sig"});
  }
  CHECK_THROWS_AS(assemble_script(ScriptExpr{multi}), TooManyKeys);
}

TEST_CASE("witness plan matches compiled slot lists") {
  auto spec = load("mutual-tc.bitml");
  auto dag = compile(spec);
  for (const auto& t : dag.templates) {
    if (t.name == "Tinit") continue;
    for (const auto& input : t.inputs) {
      REQUIRE(input.redeem_script != nullptr);
      auto plan = witness_plan(*input.redeem_script, input.selected_branch);
      REQUIRE(plan.size() == input.witness_slots.size());
      for (size_t i = 0; i < plan.size(); ++i) {
        CAPTURE(t.name);
        CHECK(plan[i] == input.witness_slots[i].name);
      }
    }
  }
}

TEST_CASE("finalized chains verify end to end") {
  for (const char* file : {"tiny-withdraw.bitml", "mutual-tc.bitml",
                           "four-secrets.bitml", "oversized-flattened.bitml"}) {
    CAPTURE(file);
    auto spec = load(file);
    auto dag = compile(spec);
    auto f = dagcheck::finalize_dag(spec, dag, dagcheck::default_preimages(spec));

    REQUIRE(f.txs.size() == dag.templates.size());
    for (size_t ti = 0; ti < dag.templates.size(); ++ti) {
      const auto& tmpl = dag.templates[ti];
      const auto& tx = f.txs[ti];
      CHECK(tx.locktime == uint32_t(tmpl.locktime));
      for (const auto& in : tx.inputs)
        CHECK(in.sequence == (tmpl.locktime > 0 ? 0xFFFFFFFE : 0xFFFFFFFF));

      // inputs reference the actual parent txids
      for (size_t j = 0; j < tmpl.inputs.size(); ++j) {
        if (const auto* ref = std::get_if<InternalRef>(&tmpl.inputs[j].source)) {
          CHECK(tx.inputs[j].prev_txid == txid(f.txs[f.index.at(ref->template_name)]));
          CHECK(tx.inputs[j].prev_vout == ref->index);
        }
        CHECK(dagcheck::vm_spend_ok(f, spec, ti, j));
        if (tmpl.inputs[j].redeem_script)
          CHECK(dagcheck::tree_spend_ok(f, spec, ti, j));
      }
      // wire round trip of the generated transaction
      CHECK(deserialize(serialize(tx)) == tx);
    }
  }
}

TEST_CASE("single corruption breaks the spend") {
  auto spec = load("mutual-tc.bitml");
  auto dag = compile(spec);
  auto f = dagcheck::finalize_dag(spec, dag, dagcheck::default_preimages(spec));

  std::mt19937 rng(17);
  for (size_t ti = 1; ti < dag.templates.size(); ++ti) {
    for (size_t j = 0; j < dag.templates[ti].inputs.size(); ++j) {
      const auto& input = dag.templates[ti].inputs[j];
      auto items = dagcheck::parse_pushes(f.txs[ti].inputs[j].script_sig);
      // corrupt each witness item (not the redeem script push)
      for (size_t k = 0; k + 1 < items.size(); ++k) {
        if (items[k].empty()) continue;
        if (input.witness_slots[k].kind == SlotDesc::Kind::Selector) continue;
        auto corrupted = items;
        corrupted[k][corrupted[k].size() / 2] ^= 0x40;
        Bytes scriptSig;
        for (const auto& item : corrupted) {
          // rebuild with direct pushes (all items are < 76 bytes or redeem)
          if (item.size() <= 0x4b) {
            scriptSig.push_back(uint8_t(item.size()));
          } else {
            scriptSig.push_back(0x4c);
            scriptSig.push_back(uint8_t(item.size()));
          }
          scriptSig.insert(scriptSig.end(), item.begin(), item.end());
        }
        CAPTURE(dag.templates[ti].name);
        CAPTURE(k);
        CHECK_FALSE(dagcheck::vm_spend_ok(f, spec, ti, j, scriptSig));
      }
    }
  }
}

TEST_CASE("missing preimages leave placeholder pushes") {
  auto spec = load("mutual-tc.bitml");
  auto dag = compile(spec);
  TestSigner signer;
  auto txs = finalize(dag, signer, {});  // no preimages at all
  auto f = dagcheck::finalize_dag(spec, dag, {});

  bool sawEmpty = false;
  for (size_t ti = 1; ti < dag.templates.size(); ++ti) {
    const auto& tmpl = dag.templates[ti];
    for (size_t j = 0; j < tmpl.inputs.size(); ++j) {
      auto items = dagcheck::parse_pushes(txs[ti].inputs[j].script_sig);
      for (size_t k = 0; k < tmpl.inputs[j].witness_slots.size(); ++k) {
        if (tmpl.inputs[j].witness_slots[k].kind == SlotDesc::Kind::Preimage) {
          CHECK(items[k].empty());
          sawEmpty = true;
          // and the input must not validate without the real preimage
          CHECK_FALSE(dagcheck::vm_spend_ok(f, spec, ti, j));
        }
      }
    }
  }
  CHECK(sawEmpty);
}

TEST_CASE("finalize refuses nonstandard DAGs") {
  auto spec = load("oversized-choice.bitml");
  auto dag = compile(spec);
  TestSigner signer;
  CHECK_THROWS_AS(finalize(dag, signer, {}), StandardnessError);
}
