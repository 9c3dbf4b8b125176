#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bitml/ast.hpp"

namespace bitml {

struct Cond;
using CondPtr = std::shared_ptr<const Cond>;

struct CondTrue {};
struct CondRevealed {
  std::string secret;
};
struct CondAuthorized {
  std::string participant;
  BranchPath path;
};
struct CondTimeReached {
  Height height = 0;
};
struct CondAnd {
  CondPtr lhs, rhs;
};

struct Cond {
  std::variant<CondTrue, CondRevealed, CondAuthorized, CondTimeReached, CondAnd> node;
};

struct RevealAction {
  std::string secret;
};
struct AuthAction {
  BranchPath path;
};
using StrategyAction = std::variant<RevealAction, AuthAction>;

struct StrategyRule {
  StrategyAction action;
  CondPtr condition;  // null = unconditional
};

// When a participant declares a strategy, it fully specifies her reveal and
// authorization behaviour; undeclared participants act adversarially.
struct Strategy {
  std::string participant;
  std::vector<StrategyRule> rules;
};

std::string to_string(const Cond& c);
std::string to_string(const StrategyRule& r, const std::string& participant);

}  // namespace bitml
