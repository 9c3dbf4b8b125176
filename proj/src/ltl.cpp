#include "bitml/ltl.hpp"

#include <sstream>

namespace bitml {

LTLPtr ltrue() { return std::make_shared<LTLFormula>(LTLFormula{LTrue{}}); }
LTLPtr lfalse() { return std::make_shared<LTLFormula>(LTLFormula{LFalse{}}); }
LTLPtr latom(LTLAtom a) {
  return std::make_shared<LTLFormula>(LTLFormula{LAtomNode{std::move(a)}});
}
LTLPtr lnot(LTLPtr p) {
  return std::make_shared<LTLFormula>(LTLFormula{LNot{std::move(p)}});
}
LTLPtr land(LTLPtr l, LTLPtr r) {
  return std::make_shared<LTLFormula>(LTLFormula{LAnd{std::move(l), std::move(r)}});
}
LTLPtr lor(LTLPtr l, LTLPtr r) {
  return std::make_shared<LTLFormula>(LTLFormula{LOr{std::move(l), std::move(r)}});
}
LTLPtr limplies(LTLPtr l, LTLPtr r) {
  return std::make_shared<LTLFormula>(
      LTLFormula{LImplies{std::move(l), std::move(r)}});
}
LTLPtr lnext(LTLPtr p) {
  return std::make_shared<LTLFormula>(LTLFormula{LNext{std::move(p)}});
}
LTLPtr luntil(LTLPtr l, LTLPtr r) {
  return std::make_shared<LTLFormula>(
      LTLFormula{LUntil{std::move(l), std::move(r)}});
}
LTLPtr lrelease(LTLPtr l, LTLPtr r) {
  return std::make_shared<LTLFormula>(
      LTLFormula{LRelease{std::move(l), std::move(r)}});
}
LTLPtr lglobally(LTLPtr p) {
  return std::make_shared<LTLFormula>(LTLFormula{LGlobally{std::move(p)}});
}
LTLPtr lfinally(LTLPtr p) {
  return std::make_shared<LTLFormula>(LTLFormula{LFinally{std::move(p)}});
}

std::string to_string(const LTLAtom& a) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomRevealed>) {
          os << x.secret << " revealed";
        } else if constexpr (std::is_same_v<T, AtomHasDeposit>) {
          os << x.participant << " has-deposit>= " << x.min << " satoshi";
        } else if constexpr (std::is_same_v<T, AtomAuthorized>) {
          os << x.participant << " authorized (branch";
          for (auto i : x.path) os << " " << i;
          os << ")";
        } else {
          os << "contract-terminated";
        }
      },
      a);
  return os.str();
}

std::string to_string(const LTLFormula& f) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LTrue>) os << "true";
        else if constexpr (std::is_same_v<T, LFalse>) os << "false";
        else if constexpr (std::is_same_v<T, LAtomNode>) os << "(" << to_string(x.atom) << ")";
        else if constexpr (std::is_same_v<T, LNot>) os << "!" << to_string(*x.inner);
        else if constexpr (std::is_same_v<T, LAnd>)
          os << "(" << to_string(*x.lhs) << " /\\ " << to_string(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, LOr>)
          os << "(" << to_string(*x.lhs) << " \\/ " << to_string(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, LImplies>)
          os << "(" << to_string(*x.lhs) << " => " << to_string(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, LNext>) os << "X" << to_string(*x.inner);
        else if constexpr (std::is_same_v<T, LUntil>)
          os << "(" << to_string(*x.lhs) << " U " << to_string(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, LRelease>)
          os << "(" << to_string(*x.lhs) << " R " << to_string(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, LGlobally>) os << "[]" << to_string(*x.inner);
        else os << "<>" << to_string(*x.inner);
      },
      f.node);
  return os.str();
}

}  // namespace bitml
