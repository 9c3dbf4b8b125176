#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bitml/ast.hpp"
#include "bitml/crypto.hpp"

namespace bitml {

// Abstract-length secrets are committed as (kSecretPad + n)-byte preimages;
// scripts check size >= kSecretPad and use size - kSecretPad as the length.
inline constexpr int64_t kSecretPad = 16;

inline constexpr Satoshi kDefaultFeePerTx = 1000;
inline constexpr size_t kMaxPushBytes = 520;
inline constexpr size_t kMaxMultisigKeys = 15;

// Deterministic key identity: same (participant, node, branch, role) always
// derives the same key. role is "sig" for the shared branch multisig, "auth"
// for an authorization slot, "deposit" for external deposit spends.
struct KeyRef {
  std::string participant;
  std::string node;  // contract node address (dotted branch path, "" = root)
  uint32_t branch = 0;
  std::string role = "sig";

  bool operator==(const KeyRef&) const = default;
  auto operator<=>(const KeyRef&) const = default;

  std::string id() const;
};

// ---------------------------------------------------------------------------
// Script expression trees

struct ScriptExpr;
using ScriptPtr = std::shared_ptr<const ScriptExpr>;

struct SzExpr;
using SzPtr = std::shared_ptr<const SzExpr>;

struct SzConst {
  int64_t value = 0;
};
struct SzSize {
  std::string slot;
};
struct SzAdd {
  SzPtr lhs, rhs;
};
struct SzSub {
  SzPtr lhs, rhs;
};
struct SzExpr {
  std::variant<SzConst, SzSize, SzAdd, SzSub> node;
};

struct TrueE {};
struct CheckSig {
  std::string slot;
  KeyRef key;
};
struct CheckMultiAll {
  std::vector<std::string> slots;  // one signature slot per key, same order
  std::vector<KeyRef> keys;
};
struct PreimageHashEq {
  std::string slot;
  Hash256 hash{};
};
struct SizeGe {
  std::string slot;
  int64_t min = 0;
};
struct CmpEq {
  SzPtr lhs, rhs;
};
struct CmpLt {
  SzPtr lhs, rhs;
};
struct NotE {
  ScriptPtr inner;
};
struct BoolAnd {
  ScriptPtr lhs, rhs;
};
struct BoolOr {
  ScriptPtr lhs, rhs;
};
// Verify-sequence conjunction of independent checks.
struct AndE {
  std::vector<ScriptPtr> terms;
};
// Branch disjunction driven by an explicit selector witness item.
struct OrE {
  std::string selector_slot;
  std::vector<ScriptPtr> branches;  // fan-in >= 2
};

struct ScriptExpr {
  std::variant<TrueE, CheckSig, CheckMultiAll, PreimageHashEq, SizeGe, CmpEq,
               CmpLt, NotE, BoolAnd, BoolOr, AndE, OrE>
      node;
};

ScriptPtr mkscript(ScriptExpr e);
SzPtr mksz(SzExpr e);

// ---------------------------------------------------------------------------
// Transaction templates

struct SlotDesc {
  enum class Kind { Signature, Preimage, Selector };
  std::string name;
  Kind kind = Kind::Signature;
  KeyRef key;          // Signature slots
  std::string secret;  // Preimage slots
};

struct InternalRef {
  std::string template_name;
  uint32_t index = 0;
};

struct TxInputTemplate {
  std::variant<Outpoint, InternalRef> source;
  std::vector<SlotDesc> witness_slots;  // script_sig push order (bottom first)
  ScriptPtr redeem_script;              // null = P2PKH (external deposits)
  int selected_branch = -1;             // OrE branch exercised by this input
};

struct P2PKHPayout {
  std::string participant;
};
struct P2SHPayout {
  ScriptPtr script;
};

struct TxOutputTemplate {
  Satoshi value = 0;
  std::variant<P2PKHPayout, P2SHPayout> payout;
};

struct TxTemplate {
  std::string name;
  std::vector<TxInputTemplate> inputs;
  std::vector<TxOutputTemplate> outputs;
  Height locktime = 0;
};

struct TxDag {
  std::vector<TxTemplate> templates;  // topological order, Tinit first
  std::map<std::string, std::string> participant_pubkeys;  // name -> hex
  Satoshi fee_per_tx = kDefaultFeePerTx;
  Satoshi total_fee_input = 0;

  const TxTemplate* find(const std::string& name) const;
};

struct InsufficientFees : std::runtime_error {
  Satoshi required = 0, available = 0;
  InsufficientFees(Satoshi req, Satoshi avail)
      : std::runtime_error("insufficient fee deposits: need " +
                           std::to_string(req) + " satoshi, have " +
                           std::to_string(avail)),
        required(req),
        available(avail) {}
};

struct StandardnessViolation {
  enum class Kind { OversizedRedeemScript, OversizedPush, TooManyKeys };
  Kind kind = Kind::OversizedRedeemScript;
  std::string location;  // "<template>:output<k>" or "<template>:input<k>"
  size_t size = 0;
  std::string message;
};

struct StandardnessError : std::runtime_error {
  std::vector<StandardnessViolation> violations;
  explicit StandardnessError(std::vector<StandardnessViolation> v)
      : std::runtime_error("standardness violations: " +
                           std::to_string(v.size())),
        violations(std::move(v)) {}
};

struct RewriteHint {
  BranchPath node;       // address of the oversized choice
  size_t branch_count = 0;
  size_t script_bytes = 0;
  std::string message;
};

std::string to_string(StandardnessViolation::Kind k);

// ---------------------------------------------------------------------------
// Operations

// Redeem script of a choice node located at `prefix`. OrE over one conjunct
// per branch; singleton choices omit the OrE.
ScriptPtr script_of(const Contract& node, const BranchPath& prefix,
                    const ContractSpec& spec);

// Phase 1: spec -> DAG of templates. Throws InsufficientFees when the fee
// deposits cannot cover fee_per_tx for every generated template; with
// strict=true also throws StandardnessError when check_standardness finds
// violations.
TxDag compile(const ContractSpec& spec, Satoshi fee_per_tx = kDefaultFeePerTx,
              bool strict = false);

std::vector<StandardnessViolation> check_standardness(const TxDag& dag);

// One hint per choice whose compiled script exceeds the push limit.
std::vector<RewriteHint> suggest_flattening(const ContractSpec& spec);

// Canonical JSON serialization of a DAG (stable field and array order).
std::string dag_to_json(const TxDag& dag);

}  // namespace bitml
