#pragma once

#include <string>
#include <vector>

#include "bitml/ast.hpp"
#include "bitml/ltl.hpp"
#include "bitml/sexpr.hpp"
#include "bitml/strategy.hpp"

namespace bitml {

struct SourceFile {
  std::string text;
  std::string path;
};

struct Query {
  enum class Kind { Liquidity, Ltl };
  Kind kind = Kind::Liquidity;
  std::string formula;  // raw LTL text for Kind::Ltl
};

struct ParsedFile {
  ContractSpec spec;
  std::vector<Strategy> strategies;  // merged per participant
  std::vector<Query> queries;
};

// All of these throw ParseError on malformed input. Name resolution is
// deferred to check_static; the parser only enforces the grammar.
ParsedFile parse_file(const SourceFile& src);
ContractSpec parse_contract(const SourceFile& src);
Strategy parse_strategy(const std::string& text);
// Any number of strategy forms, merged per participant.
std::vector<Strategy> parse_strategies(const std::string& text);
LTLPtr parse_ltl(const std::string& text);

// Canonical source text; parse_contract(pretty_print(spec)) is structurally
// equal to spec.
std::string pretty_print(const ContractSpec& spec);

}  // namespace bitml
