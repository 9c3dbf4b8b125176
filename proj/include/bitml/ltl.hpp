#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bitml/ast.hpp"

namespace bitml {

struct AtomRevealed {
  std::string secret;
  bool operator==(const AtomRevealed&) const = default;
};
struct AtomHasDeposit {
  std::string participant;
  Satoshi min = 0;
  bool operator==(const AtomHasDeposit&) const = default;
};
struct AtomAuthorized {
  std::string participant;
  BranchPath path;
  bool operator==(const AtomAuthorized&) const = default;
};
struct AtomTerminated {
  bool operator==(const AtomTerminated&) const = default;
};

using LTLAtom =
    std::variant<AtomRevealed, AtomHasDeposit, AtomAuthorized, AtomTerminated>;

struct LTLFormula;
using LTLPtr = std::shared_ptr<const LTLFormula>;

struct LTrue {};
struct LFalse {};
struct LAtomNode {
  LTLAtom atom;
};
struct LNot {
  LTLPtr inner;
};
struct LAnd {
  LTLPtr lhs, rhs;
};
struct LOr {
  LTLPtr lhs, rhs;
};
struct LImplies {
  LTLPtr lhs, rhs;
};
struct LNext {
  LTLPtr inner;
};
struct LUntil {
  LTLPtr lhs, rhs;
};
struct LRelease {  // dual of until, used by negation normal form
  LTLPtr lhs, rhs;
};
struct LGlobally {
  LTLPtr inner;
};
struct LFinally {
  LTLPtr inner;
};

struct LTLFormula {
  std::variant<LTrue, LFalse, LAtomNode, LNot, LAnd, LOr, LImplies, LNext,
               LUntil, LRelease, LGlobally, LFinally>
      node;
};

LTLPtr ltrue();
LTLPtr lfalse();
LTLPtr latom(LTLAtom a);
LTLPtr lnot(LTLPtr p);
LTLPtr land(LTLPtr l, LTLPtr r);
LTLPtr lor(LTLPtr l, LTLPtr r);
LTLPtr limplies(LTLPtr l, LTLPtr r);
LTLPtr lnext(LTLPtr p);
LTLPtr luntil(LTLPtr l, LTLPtr r);
LTLPtr lrelease(LTLPtr l, LTLPtr r);
LTLPtr lglobally(LTLPtr p);
LTLPtr lfinally(LTLPtr p);

std::string to_string(const LTLAtom& a);
std::string to_string(const LTLFormula& f);

}  // namespace bitml
