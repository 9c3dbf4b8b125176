#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bitml/ltl.hpp"

namespace bitml {

// Negation normal form: negations pushed to the atoms, G/F/=> expanded
// into Until/Release.
struct NnfFormula;
using NnfPtr = std::shared_ptr<const NnfFormula>;

struct NnfTrue {};
struct NnfFalse {};
struct NnfLit {
  LTLAtom atom;
  bool negated = false;
};
struct NnfAnd {
  NnfPtr lhs, rhs;
};
struct NnfOr {
  NnfPtr lhs, rhs;
};
struct NnfNext {
  NnfPtr inner;
};
struct NnfUntil {
  NnfPtr lhs, rhs;
};
struct NnfRelease {
  NnfPtr lhs, rhs;
};

struct NnfFormula {
  std::variant<NnfTrue, NnfFalse, NnfLit, NnfAnd, NnfOr, NnfNext, NnfUntil,
               NnfRelease>
      node;
};

// negate=true converts !formula.
NnfPtr to_nnf(const LTLFormula& f, bool negate);
std::string nnf_key(const NnfFormula& f);

// Generalized Buchi automaton over state labelings, built with the
// classic tableau expansion. A run reads L(s0) L(s1) ...; a node accepts
// an input letter iff all its literals hold in it. Edge i -> j exists iff
// i is in nodes[j].incoming; initial edges come from the pseudo-node -1.
struct BuchiAutomaton {
  struct Node {
    std::vector<NnfLit> literals;
    std::set<int> incoming;             // -1 = initial pseudo-node
    std::vector<size_t> accepting_in;   // acceptance sets containing this node
  };
  std::vector<Node> nodes;
  size_t acceptance_sets = 0;

  bool edge(int from, size_t to) const {
    return nodes[to].incoming.count(from) > 0;
  }
};

BuchiAutomaton ltl_to_buchi(const NnfPtr& formula);

}  // namespace bitml
