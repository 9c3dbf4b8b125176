#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bitml/ast.hpp"
#include "bitml/ltl.hpp"
#include "bitml/semantics.hpp"
#include "bitml/strategy.hpp"

namespace bitml {

enum class MoveClass { Guaranteed, Adversarial, Prohibited };

std::string to_string(MoveClass c);

inline constexpr size_t kDefaultStateLimit = 10'000'000;

struct StateLimitExceeded : std::runtime_error {
  explicit StateLimitExceeded(size_t limit)
      : std::runtime_error("state limit exceeded (" + std::to_string(limit) + ")") {}
};

// Fire and Delay are always Guaranteed. Reveals/authorizations of a
// participant without a strategy are Adversarial; with a strategy they are
// Guaranteed when a rule matches and its condition holds, Prohibited
// otherwise.
MoveClass classify_move(const Move& move, const std::vector<Strategy>& strategies,
                        const Configuration& cfg, const SemanticsContext& ctx);

bool cond_holds(const Cond& cond, const Configuration& cfg,
                const SemanticsContext& ctx);

// Explicit graph of configurations under a fixed lengths assignment.
// Prohibited moves are pruned; edge classes are recorded.
struct StateGraph {
  struct Edge {
    size_t from = 0;
    size_t to = 0;
    Move move;
    MoveClass cls = MoveClass::Guaranteed;
  };
  std::vector<Configuration> states;  // index 0 = initial configuration
  std::vector<std::vector<Edge>> out;

  size_t size() const { return states.size(); }
};

StateGraph reachable_states(const SemanticsContext& ctx,
                            const std::vector<Strategy>& strategies,
                            size_t state_limit = kDefaultStateLimit);

// One lengths assignment per predicate-equivalence region (Cartesian
// product of per-secret sample sets), in secret-name order.
std::vector<std::map<std::string, int64_t>> sample_secret_regions(
    const ContractSpec& spec);

// Per-secret sample sets, exposed for inspection and tests.
std::map<std::string, std::vector<int64_t>> secret_sample_sets(
    const ContractSpec& spec);

struct Witness {
  std::map<std::string, int64_t> lengths;  // failing region
  std::vector<Move> prefix;                // moves from the initial state
  std::vector<Move> cycle;                 // LTL lasso cycle (empty otherwise)
  bool stutter_cycle = false;              // cycle is a deadlock self-loop
};

struct VerificationStats {
  size_t states_explored = 0;
  size_t regions = 0;
  double wall_seconds = 0.0;
};

struct VerificationResult {
  bool verdict = false;
  std::optional<Witness> witness;
  VerificationStats stats;
};

// Liquidity: from every reachable state there is a path of Guaranteed
// moves to a state whose active balance is <= epsilon; conjunction over
// all secret regions.
VerificationResult check_liquidity(const ContractSpec& spec,
                                   const std::vector<Strategy>& strategies,
                                   Satoshi epsilon = 0,
                                   size_t state_limit = kDefaultStateLimit);

// LTL over all maximal traces (deadlocks stutter-extended), under weak
// fairness on Guaranteed moves; conjunction over all secret regions. A
// false verdict carries a replayable lasso.
VerificationResult check_ltl(const ContractSpec& spec,
                             const std::vector<Strategy>& strategies,
                             const LTLPtr& formula,
                             size_t state_limit = kDefaultStateLimit);

}  // namespace bitml
