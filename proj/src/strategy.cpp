#include "bitml/strategy.hpp"

#include <sstream>

namespace bitml {

std::string to_string(const Cond& c) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CondTrue>) {
          os << "true";
        } else if constexpr (std::is_same_v<T, CondRevealed>) {
          os << "(revealed " << x.secret << ")";
        } else if constexpr (std::is_same_v<T, CondAuthorized>) {
          os << "(authorized \"" << x.participant << "\" (branch";
          for (auto i : x.path) os << " " << i;
          os << "))";
        } else if constexpr (std::is_same_v<T, CondTimeReached>) {
          os << "(time>= " << x.height << ")";
        } else {
          os << "(and " << to_string(*x.lhs) << " " << to_string(*x.rhs) << ")";
        }
      },
      c.node);
  return os.str();
}

std::string to_string(const StrategyRule& r, const std::string& participant) {
  std::ostringstream os;
  os << "(strategy \"" << participant << "\" ";
  if (auto* rev = std::get_if<RevealAction>(&r.action)) {
    os << "(do-reveal " << rev->secret << ")";
  } else {
    os << "(do-auth (branch";
    for (auto i : std::get<AuthAction>(r.action).path) os << " " << i;
    os << "))";
  }
  if (r.condition) os << " (if " << to_string(*r.condition) << ")";
  os << ")";
  return os.str();
}

}  // namespace bitml
