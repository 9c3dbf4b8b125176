#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bitml {

using Satoshi = int64_t;
using Height = int64_t;

inline constexpr Satoshi kSatoshiPerBtc = 100'000'000;

struct Participant {
  std::string name;
  std::string pubkey;  // 33-byte compressed key, 66 hex chars

  bool operator==(const Participant&) const = default;
};

struct Outpoint {
  std::string txid;  // 64 hex chars, display byte order
  uint32_t vout = 0;

  bool operator==(const Outpoint&) const = default;
  auto operator<=>(const Outpoint&) const = default;
};

struct DepositItem {
  std::string owner;
  Satoshi value = 0;
  Outpoint outpoint;

  bool operator==(const DepositItem&) const = default;
};

struct SecretCommitment {
  std::string owner;
  std::string name;
  std::string hash;  // sha256 digest, 64 hex chars

  bool operator==(const SecretCommitment&) const = default;
};

struct Precondition {
  std::vector<DepositItem> persistent_deposits;
  std::vector<SecretCommitment> secrets;
  std::vector<DepositItem> fee_deposits;

  bool operator==(const Precondition&) const = default;
};

// ---------------------------------------------------------------------------
// Predicates over revealed secret lengths

struct AExpr;
using AExprPtr = std::shared_ptr<const AExpr>;

struct IntConst {
  int64_t value = 0;
};
struct SecretLen {
  std::string secret;
};
struct AAdd {
  AExprPtr lhs, rhs;
};
struct ASub {
  AExprPtr lhs, rhs;
};

struct AExpr {
  std::variant<IntConst, SecretLen, AAdd, ASub> node;
};

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

struct PTrue {};
struct PNot {
  PredicatePtr inner;
};
struct PAnd {
  PredicatePtr lhs, rhs;
};
struct POr {
  PredicatePtr lhs, rhs;
};
struct PEq {
  AExprPtr lhs, rhs;
};
struct PLt {
  AExprPtr lhs, rhs;
};

struct Predicate {
  std::variant<PTrue, PNot, PAnd, POr, PEq, PLt> node;
};

AExprPtr aconst(int64_t v);
AExprPtr alen(std::string secret);
AExprPtr aadd(AExprPtr l, AExprPtr r);
AExprPtr asub(AExprPtr l, AExprPtr r);
PredicatePtr ptrue();
PredicatePtr pnot(PredicatePtr p);
PredicatePtr pand(PredicatePtr l, PredicatePtr r);
PredicatePtr por(PredicatePtr l, PredicatePtr r);
PredicatePtr peq(AExprPtr l, AExprPtr r);
PredicatePtr plt(AExprPtr l, AExprPtr r);

bool equal(const AExpr& a, const AExpr& b);
bool equal(const Predicate& a, const Predicate& b);

struct UnboundSecretError : std::runtime_error {
  explicit UnboundSecretError(const std::string& name)
      : std::runtime_error("unbound secret in predicate: " + name) {}
};

// Evaluation is exact (arbitrary precision internally); throws
// UnboundSecretError when a SecretLen has no binding.
bool eval_predicate(const Predicate& p,
                    const std::map<std::string, int64_t>& lengths);

// Secret names mentioned anywhere in the expression / predicate.
void collect_secrets(const AExpr& e, std::set<std::string>& out);
void collect_secrets(const Predicate& p, std::set<std::string>& out);

// ---------------------------------------------------------------------------
// Contract tree

struct Contract;
using ContractPtr = std::shared_ptr<const Contract>;

struct AuthGuard {
  std::string authorizer;
};
struct AfterGuard {
  Height height = 0;
};
using Guard = std::variant<AuthGuard, AfterGuard>;

struct Withdraw {
  std::string recipient;
};
struct SplitArm {
  Satoshi value = 0;
  ContractPtr contract;
};
struct Split {
  std::vector<SplitArm> arms;
};
struct Reveal {
  std::vector<std::string> secrets;
  PredicatePtr predicate;  // null = no predicate (true)
  ContractPtr continuation;
};

// One alternative of a choice: a stack of auth/after guards over a body.
struct Branch {
  std::vector<Guard> guards;
  std::variant<Withdraw, Split, Reveal> body;
};

// A choice over branches; a singleton list means no alternative.
struct Contract {
  std::vector<Branch> branches;
};

bool equal(const Contract& a, const Contract& b);
bool equal(const Branch& a, const Branch& b);

// Addresses a branch in the tree: indices descend through choices and,
// below a split branch, through its arms (index pairs branch,arm).
using BranchPath = std::vector<uint32_t>;

std::string path_to_string(const BranchPath& p);

// Resolves a path to a branch; returns null when it does not resolve.
const Branch* resolve_branch(const Contract& root, const BranchPath& path);

struct ContractSpec {
  std::vector<Participant> participants;
  Precondition precondition;
  Contract contract;

  const Participant* find_participant(const std::string& name) const;
  const SecretCommitment* find_secret(const std::string& name) const;
  Satoshi total_deposit_value() const;
  Satoshi total_fee_value() const;
  // Sorted, deduplicated set of all After heights in the contract.
  std::vector<Height> deadlines() const;
};

// ---------------------------------------------------------------------------
// Static checks

enum class StaticErrorKind {
  DuplicateSecretHash,
  DuplicateOutpoint,
  UnknownParticipant,
  UnknownSecret,
  ValueFlowMismatch,
  DuplicateSecretName,
  BadParticipant,
};

struct StaticError {
  StaticErrorKind kind;
  std::string subject;  // the offending name / hash / path
  std::string message;

  bool operator==(const StaticError&) const = default;
};

std::string to_string(StaticErrorKind k);

// All violations; empty list means well-formed. Order-insensitive in the
// precondition entries (same error multiset under permutation).
std::vector<StaticError> check_static(const ContractSpec& spec);

// Reports every split whose arm values do not tile the incoming balance.
std::vector<StaticError> check_value_flow(const ContractSpec& spec);

}  // namespace bitml
