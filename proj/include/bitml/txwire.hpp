#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitml/compiler.hpp"
#include "bitml/crypto.hpp"

namespace bitml {

// ---------------------------------------------------------------------------
// Legacy (pre-SegWit) transactions

struct TxIn {
  Hash256 prev_txid{};  // internal byte order
  uint32_t prev_vout = 0;
  Bytes script_sig;
  uint32_t sequence = 0xFFFFFFFF;

  bool operator==(const TxIn&) const = default;
};

struct TxOut {
  Satoshi value = 0;
  Bytes script_pubkey;

  bool operator==(const TxOut&) const = default;
};

struct RawTx {
  uint32_t version = 2;
  std::vector<TxIn> inputs;
  std::vector<TxOut> outputs;
  uint32_t locktime = 0;

  bool operator==(const RawTx&) const = default;
};

struct MalformedBytes : std::runtime_error {
  explicit MalformedBytes(const std::string& what)
      : std::runtime_error("malformed transaction bytes: " + what) {}
};

struct IndexOutOfRange : std::out_of_range {
  explicit IndexOutOfRange(size_t idx)
      : std::out_of_range("input index out of range: " + std::to_string(idx)) {}
};

Bytes serialize(const RawTx& tx);
RawTx deserialize(std::span<const uint8_t> bytes);

Hash256 txid(const RawTx& tx);         // internal byte order
std::string txid_hex(const RawTx& tx);  // byte-reversed display order

// Legacy SIGHASH_ALL: the signed input's script is replaced by script_code,
// every other input script is blanked, 4-byte hashtype 0x01 appended.
Hash256 sighash_all(const RawTx& tx, size_t input_index,
                    const Bytes& script_code);

// ---------------------------------------------------------------------------
// Script assembly

struct PushTooLarge : std::runtime_error {
  size_t size = 0;
  explicit PushTooLarge(size_t s)
      : std::runtime_error("script push exceeds 520 bytes: " +
                           std::to_string(s)),
        size(s) {}
};

struct TooManyKeys : std::runtime_error {
  size_t count = 0;
  explicit TooManyKeys(size_t n)
      : std::runtime_error("multisig with more than 15 keys: " +
                           std::to_string(n)),
        count(n) {}
};

struct MissingSlot : std::runtime_error {
  std::string slot;
  explicit MissingSlot(const std::string& s)
      : std::runtime_error("witness is missing slot: " + s), slot(s) {}
};

// Minimal CScriptNum codec.
Bytes scriptnum_encode(int64_t v);
int64_t scriptnum_decode(std::span<const uint8_t> bytes);  // <= 8 bytes

// Deterministic lowering of a script expression to opcode bytes. The
// opcode mapping is documented in docs/script-lowering.md and frozen by
// golden byte tests.
Bytes assemble_script(const ScriptExpr& e);

// Witness slot names in script_sig push order (bottom of the stack first);
// selected_branch picks the conjunct of a top-level OrE.
std::vector<std::string> witness_plan(const ScriptExpr& e, int selected_branch);

struct SigCheckContext {
  std::function<bool(const KeyRef& key, const Bytes& sig)> check;
};

// Structural evaluation of the expression tree against named witness
// items; the production-side oracle for compiled scripts.
bool interpret(const ScriptExpr& e, const std::map<std::string, Bytes>& witness,
               const SigCheckContext& ctx);

// ---------------------------------------------------------------------------
// Signing

struct Signer {
  virtual ~Signer() = default;
  virtual Bytes pubkey(const KeyRef& key) const = 0;
  virtual Bytes sign(const KeyRef& key, const Hash256& digest) const = 0;
};

// Keys and signatures are plain hashes: deterministic, verifiable by the
// bundled interpreter, and NOT broadcast-safe. Real ECDSA signing can be
// plugged in through the Signer interface.
struct TestSigner : Signer {
  Bytes pubkey(const KeyRef& key) const override;
  Bytes sign(const KeyRef& key, const Hash256& digest) const override;

  static bool verify(std::span<const uint8_t> pubkey,
                     std::span<const uint8_t> sig, const Hash256& digest);
};

// The key bytes baked into assembled scripts (shared with TestSigner).
Bytes derive_pubkey(const KeyRef& key);

Bytes p2pkh_script(std::span<const uint8_t> pubkey);
Bytes p2sh_script(std::span<const uint8_t> redeem_script);

// Phase 2: instantiate a DAG as raw transactions in topological order.
// Preimages absent from the map are filled with an empty placeholder push
// (the input is not executable until the real preimage is substituted).
// Throws StandardnessError when check_standardness(dag) is non-empty.
std::vector<RawTx> finalize(const TxDag& dag, const Signer& signer,
                            const std::map<std::string, Bytes>& preimages = {});

}  // namespace bitml
