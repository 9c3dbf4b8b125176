#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bitml/ast.hpp"
#include "bitml/ltl.hpp"

namespace bitml {

// Quotient of time by the contract's deadlines: I0=[0,t1), ..., Ik=[tk,inf).
struct TimePartition {
  std::vector<Height> deadlines;  // sorted, strictly increasing

  size_t interval_count() const { return deadlines.size() + 1; }
  Height interval_start(size_t idx) const {
    return idx == 0 ? 0 : deadlines[idx - 1];
  }
};

struct ActiveContract {
  std::string cid;       // lineage id: root "c", split children "c.0", ...
  BranchPath prefix;     // root-relative path of this contract node
  ContractPtr contract;  // the current choice
  Satoshi balance = 0;
};

struct Configuration {
  std::vector<ActiveContract> active;  // kept sorted by cid
  // Inert outputs produced by withdraw; (owner, value) multiset as a
  // sorted vector.
  std::vector<std::pair<std::string, Satoshi>> deposits;
  // nullopt = committed; value = revealed with that length.
  std::map<std::string, std::optional<int64_t>> secret_state;
  std::set<std::pair<std::string, BranchPath>> auths;
  size_t interval = 0;

  Satoshi active_balance() const;
  Satoshi deposit_balance(const std::string& owner) const;
  Satoshi total_value() const;
  // Canonical serialization; equal strings iff structurally equal states.
  std::string key() const;
};

struct Delay {};
struct RevealSecret {
  std::string participant;
  std::string secret;
  int64_t length = 0;
};
struct Authorize {
  std::string participant;
  BranchPath path;
};
struct Fire {
  std::string cid;
  BranchPath path;
};

using Move = std::variant<Delay, RevealSecret, Authorize, Fire>;

bool operator==(const Move& a, const Move& b);
std::string to_string(const Move& m);

struct IllegalMoveError : std::runtime_error {
  explicit IllegalMoveError(const std::string& what)
      : std::runtime_error("illegal move: " + what) {}
};

// Fixed per exploration run: the contract, the time partition derived from
// its deadlines, and the length each secret will have if revealed.
struct SemanticsContext {
  const ContractSpec* spec = nullptr;
  TimePartition partition;
  std::map<std::string, int64_t> lengths;  // region sample, one per secret

  static SemanticsContext make(const ContractSpec& spec,
                               std::map<std::string, int64_t> lengths);
};

Configuration initial_configuration(const SemanticsContext& ctx);

// Enabled moves, in a deterministic order: Delay, reveals, authorizations,
// fires. A fireable branch guarded by `after` is withheld while an
// unguarded sibling of the same choice is fireable (the timeout alternative
// has lost the race once the intended branch is publishable).
std::vector<Move> enumerate_moves(const Configuration& cfg,
                                  const SemanticsContext& ctx);

// Throws IllegalMoveError when the move is not currently enabled.
Configuration apply_move(const Configuration& cfg, const Move& move,
                         const SemanticsContext& ctx);

// Precondition: move was obtained from enumerate_moves(cfg, ctx). Used by
// the exploration loop, which already holds the enabled set.
Configuration apply_move_unchecked(const Configuration& cfg, const Move& move,
                                   const SemanticsContext& ctx);

bool atom_holds(const Configuration& cfg, const LTLAtom& atom);

}  // namespace bitml
