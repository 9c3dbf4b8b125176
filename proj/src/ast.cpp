#include "bitml/ast.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <sstream>

namespace bitml {

using boost::multiprecision::cpp_int;

AExprPtr aconst(int64_t v) { return std::make_shared<AExpr>(AExpr{IntConst{v}}); }
AExprPtr alen(std::string secret) {
  return std::make_shared<AExpr>(AExpr{SecretLen{std::move(secret)}});
}
AExprPtr aadd(AExprPtr l, AExprPtr r) {
  return std::make_shared<AExpr>(AExpr{AAdd{std::move(l), std::move(r)}});
}
AExprPtr asub(AExprPtr l, AExprPtr r) {
  return std::make_shared<AExpr>(AExpr{ASub{std::move(l), std::move(r)}});
}
PredicatePtr ptrue() { return std::make_shared<Predicate>(Predicate{PTrue{}}); }
PredicatePtr pnot(PredicatePtr p) {
  return std::make_shared<Predicate>(Predicate{PNot{std::move(p)}});
}
PredicatePtr pand(PredicatePtr l, PredicatePtr r) {
  return std::make_shared<Predicate>(Predicate{PAnd{std::move(l), std::move(r)}});
}
PredicatePtr por(PredicatePtr l, PredicatePtr r) {
  return std::make_shared<Predicate>(Predicate{POr{std::move(l), std::move(r)}});
}
PredicatePtr peq(AExprPtr l, AExprPtr r) {
  return std::make_shared<Predicate>(Predicate{PEq{std::move(l), std::move(r)}});
}
PredicatePtr plt(AExprPtr l, AExprPtr r) {
  return std::make_shared<Predicate>(Predicate{PLt{std::move(l), std::move(r)}});
}

bool equal(const AExpr& a, const AExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntConst>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, SecretLen>) return x.secret == y.secret;
        else return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
      },
      a.node);
}

bool equal(const Predicate& a, const Predicate& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, PTrue>) return true;
        else if constexpr (std::is_same_v<T, PNot>) return equal(*x.inner, *y.inner);
        else if constexpr (std::is_same_v<T, PAnd> || std::is_same_v<T, POr>)
          return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        else
          return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
      },
      a.node);
}

namespace {

cpp_int eval_aexpr(const AExpr& e, const std::map<std::string, int64_t>& lengths) {
  return std::visit(
      [&](const auto& x) -> cpp_int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntConst>) {
          return cpp_int(x.value);
        } else if constexpr (std::is_same_v<T, SecretLen>) {
          auto it = lengths.find(x.secret);
          if (it == lengths.end()) throw UnboundSecretError(x.secret);
          return cpp_int(it->second);
        } else if constexpr (std::is_same_v<T, AAdd>) {
          return eval_aexpr(*x.lhs, lengths) + eval_aexpr(*x.rhs, lengths);
        } else {
          return eval_aexpr(*x.lhs, lengths) - eval_aexpr(*x.rhs, lengths);
        }
      },
      e.node);
}

}  // namespace

bool eval_predicate(const Predicate& p,
                    const std::map<std::string, int64_t>& lengths) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PTrue>) return true;
        else if constexpr (std::is_same_v<T, PNot>) return !eval_predicate(*x.inner, lengths);
        else if constexpr (std::is_same_v<T, PAnd>)
          return eval_predicate(*x.lhs, lengths) && eval_predicate(*x.rhs, lengths);
        else if constexpr (std::is_same_v<T, POr>)
          return eval_predicate(*x.lhs, lengths) || eval_predicate(*x.rhs, lengths);
        else if constexpr (std::is_same_v<T, PEq>)
          return eval_aexpr(*x.lhs, lengths) == eval_aexpr(*x.rhs, lengths);
        else
          return eval_aexpr(*x.lhs, lengths) < eval_aexpr(*x.rhs, lengths);
      },
      p.node);
}

void collect_secrets(const AExpr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SecretLen>) out.insert(x.secret);
        else if constexpr (std::is_same_v<T, AAdd> || std::is_same_v<T, ASub>) {
          collect_secrets(*x.lhs, out);
          collect_secrets(*x.rhs, out);
        }
      },
      e.node);
}

void collect_secrets(const Predicate& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PNot>) collect_secrets(*x.inner, out);
        else if constexpr (std::is_same_v<T, PAnd> || std::is_same_v<T, POr>) {
          collect_secrets(*x.lhs, out);
          collect_secrets(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, PEq> || std::is_same_v<T, PLt>) {
          collect_secrets(*x.lhs, out);
          collect_secrets(*x.rhs, out);
        }
      },
      p.node);
}

bool equal(const Branch& a, const Branch& b) {
  if (a.guards.size() != b.guards.size()) return false;
  for (size_t i = 0; i < a.guards.size(); ++i) {
    if (a.guards[i].index() != b.guards[i].index()) return false;
    if (auto* g = std::get_if<AuthGuard>(&a.guards[i])) {
      if (g->authorizer != std::get<AuthGuard>(b.guards[i]).authorizer) return false;
    } else {
      if (std::get<AfterGuard>(a.guards[i]).height !=
          std::get<AfterGuard>(b.guards[i]).height)
        return false;
    }
  }
  if (a.body.index() != b.body.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.body);
        if constexpr (std::is_same_v<T, Withdraw>) {
          return x.recipient == y.recipient;
        } else if constexpr (std::is_same_v<T, Split>) {
          if (x.arms.size() != y.arms.size()) return false;
          for (size_t i = 0; i < x.arms.size(); ++i) {
            if (x.arms[i].value != y.arms[i].value) return false;
            if (!equal(*x.arms[i].contract, *y.arms[i].contract)) return false;
          }
          return true;
        } else {
          if (x.secrets != y.secrets) return false;
          if (bool(x.predicate) != bool(y.predicate)) return false;
          if (x.predicate && !equal(*x.predicate, *y.predicate)) return false;
          return equal(*x.continuation, *y.continuation);
        }
      },
      a.body);
}

bool equal(const Contract& a, const Contract& b) {
  if (a.branches.size() != b.branches.size()) return false;
  for (size_t i = 0; i < a.branches.size(); ++i)
    if (!equal(a.branches[i], b.branches[i])) return false;
  return true;
}

std::string path_to_string(const BranchPath& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << '.';
    os << p[i];
  }
  return os.str();
}

const Branch* resolve_branch(const Contract& root, const BranchPath& path) {
  const Contract* cur = &root;
  size_t i = 0;
  while (true) {
    if (i >= path.size()) return nullptr;
    if (path[i] >= cur->branches.size()) return nullptr;
    const Branch& b = cur->branches[path[i]];
    ++i;
    if (i == path.size()) return &b;
    if (auto* split = std::get_if<Split>(&b.body)) {
      if (path[i] >= split->arms.size()) return nullptr;
      cur = split->arms[path[i]].contract.get();
      ++i;
    } else if (auto* reveal = std::get_if<Reveal>(&b.body)) {
      cur = reveal->continuation.get();
    } else {
      return nullptr;  // withdraw has no continuation
    }
  }
}

const Participant* ContractSpec::find_participant(const std::string& name) const {
  for (const auto& p : participants)
    if (p.name == name) return &p;
  return nullptr;
}

const SecretCommitment* ContractSpec::find_secret(const std::string& name) const {
  for (const auto& s : precondition.secrets)
    if (s.name == name) return &s;
  return nullptr;
}

Satoshi ContractSpec::total_deposit_value() const {
  Satoshi sum = 0;
  for (const auto& d : precondition.persistent_deposits) sum += d.value;
  return sum;
}

Satoshi ContractSpec::total_fee_value() const {
  Satoshi sum = 0;
  for (const auto& d : precondition.fee_deposits) sum += d.value;
  return sum;
}

namespace {

void collect_deadlines(const Contract& c, std::set<Height>& out) {
  for (const auto& b : c.branches) {
    for (const auto& g : b.guards)
      if (auto* a = std::get_if<AfterGuard>(&g)) out.insert(a->height);
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Split>) {
            for (const auto& arm : body.arms) collect_deadlines(*arm.contract, out);
          } else if constexpr (std::is_same_v<T, Reveal>) {
            collect_deadlines(*body.continuation, out);
          }
        },
        b.body);
  }
}

}  // namespace

std::vector<Height> ContractSpec::deadlines() const {
  std::set<Height> set;
  collect_deadlines(contract, set);
  return {set.begin(), set.end()};
}

std::string to_string(StaticErrorKind k) {
  switch (k) {
    case StaticErrorKind::DuplicateSecretHash: return "DuplicateSecretHash";
    case StaticErrorKind::DuplicateOutpoint: return "DuplicateOutpoint";
    case StaticErrorKind::UnknownParticipant: return "UnknownParticipant";
    case StaticErrorKind::UnknownSecret: return "UnknownSecret";
    case StaticErrorKind::ValueFlowMismatch: return "ValueFlowMismatch";
    case StaticErrorKind::DuplicateSecretName: return "DuplicateSecretName";
    case StaticErrorKind::BadParticipant: return "BadParticipant";
  }
  return "?";
}

namespace {

bool valid_pubkey(const std::string& hex) {
  if (hex.size() != 66) return false;
  if (!(hex[0] == '0' && (hex[1] == '2' || hex[1] == '3'))) return false;
  return std::all_of(hex.begin(), hex.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  });
}

// Walk all branches, tracking the set of secrets revealable on the path
// (committed + listed in enclosing reveals).
void check_contract_refs(const ContractSpec& spec, const Contract& c,
                         std::set<std::string> revealed_on_path,
                         std::vector<StaticError>& errors) {
  for (const auto& b : c.branches) {
    for (const auto& g : b.guards) {
      if (auto* a = std::get_if<AuthGuard>(&g)) {
        if (!spec.find_participant(a->authorizer))
          errors.push_back({StaticErrorKind::UnknownParticipant, a->authorizer,
                            "auth guard names undeclared participant"});
      }
    }
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Withdraw>) {
            if (!spec.find_participant(body.recipient))
              errors.push_back({StaticErrorKind::UnknownParticipant, body.recipient,
                                "withdraw names undeclared participant"});
          } else if constexpr (std::is_same_v<T, Split>) {
            for (const auto& arm : body.arms)
              check_contract_refs(spec, *arm.contract, revealed_on_path, errors);
          } else {
            auto scope = revealed_on_path;
            for (const auto& s : body.secrets) {
              if (!spec.find_secret(s))
                errors.push_back({StaticErrorKind::UnknownSecret, s,
                                  "reveal names uncommitted secret"});
              scope.insert(s);
            }
            if (body.predicate) {
              std::set<std::string> used;
              collect_secrets(*body.predicate, used);
              for (const auto& s : used) {
                if (!scope.count(s))
                  errors.push_back({StaticErrorKind::UnknownSecret, s,
                                    "predicate names a secret not revealed on this path"});
              }
            }
            check_contract_refs(spec, *body.continuation, scope, errors);
          }
        },
        b.body);
  }
}

void check_split_values(const Contract& c, Satoshi incoming, BranchPath prefix,
                        std::vector<StaticError>& errors) {
  for (uint32_t i = 0; i < c.branches.size(); ++i) {
    const Branch& b = c.branches[i];
    BranchPath path = prefix;
    path.push_back(i);
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Split>) {
            Satoshi sum = 0;
            for (const auto& arm : body.arms) sum += arm.value;
            if (sum != incoming) {
              errors.push_back(
                  {StaticErrorKind::ValueFlowMismatch, path_to_string(path),
                   "split arms sum to " + std::to_string(sum) +
                       " but incoming balance is " + std::to_string(incoming)});
            }
            for (uint32_t j = 0; j < body.arms.size(); ++j) {
              BranchPath armPath = path;
              armPath.push_back(j);
              check_split_values(*body.arms[j].contract, body.arms[j].value,
                                 armPath, errors);
            }
          } else if constexpr (std::is_same_v<T, Reveal>) {
            check_split_values(*body.continuation, incoming, path, errors);
          }
        },
        b.body);
  }
}

}  // namespace

std::vector<StaticError> check_value_flow(const ContractSpec& spec) {
  std::vector<StaticError> errors;
  check_split_values(spec.contract, spec.total_deposit_value(), {}, errors);
  return errors;
}

std::vector<StaticError> check_static(const ContractSpec& spec) {
  std::vector<StaticError> errors;

  std::set<std::string> names;
  for (const auto& p : spec.participants) {
    if (!names.insert(p.name).second)
      errors.push_back({StaticErrorKind::BadParticipant, p.name,
                        "participant declared twice"});
    if (p.name.empty() || !valid_pubkey(p.pubkey))
      errors.push_back({StaticErrorKind::BadParticipant, p.name,
                        "participant needs a nonempty name and a 33-byte compressed pubkey"});
  }

  std::map<Outpoint, int> outpoints;
  auto note_outpoint = [&](const DepositItem& d) {
    if (++outpoints[d.outpoint] == 2)
      errors.push_back({StaticErrorKind::DuplicateOutpoint,
                        d.outpoint.txid + ":" + std::to_string(d.outpoint.vout),
                        "outpoint used by more than one deposit"});
    if (!spec.find_participant(d.owner))
      errors.push_back({StaticErrorKind::UnknownParticipant, d.owner,
                        "deposit owner not declared"});
  };
  for (const auto& d : spec.precondition.persistent_deposits) note_outpoint(d);
  for (const auto& d : spec.precondition.fee_deposits) note_outpoint(d);

  std::map<std::string, int> hashes;
  std::map<std::string, int> secretNames;
  for (const auto& s : spec.precondition.secrets) {
    if (++hashes[s.hash] == 2)
      errors.push_back({StaticErrorKind::DuplicateSecretHash, s.hash,
                        "two secrets commit the same hash"});
    if (++secretNames[s.name] == 2)
      errors.push_back({StaticErrorKind::DuplicateSecretName, s.name,
                        "secret name committed twice"});
    if (!spec.find_participant(s.owner))
      errors.push_back({StaticErrorKind::UnknownParticipant, s.owner,
                        "secret owner not declared"});
  }

  check_contract_refs(spec, spec.contract, {}, errors);

  auto flow = check_value_flow(spec);
  errors.insert(errors.end(), flow.begin(), flow.end());
  return errors;
}

}  // namespace bitml
