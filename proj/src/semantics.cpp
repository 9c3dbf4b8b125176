#include "bitml/semantics.hpp"

#include <algorithm>
#include <sstream>

namespace bitml {

Satoshi Configuration::active_balance() const {
  Satoshi sum = 0;
  for (const auto& a : active) sum += a.balance;
  return sum;
}

Satoshi Configuration::deposit_balance(const std::string& owner) const {
  Satoshi sum = 0;
  for (const auto& [o, v] : deposits)
    if (o == owner) sum += v;
  return sum;
}

Satoshi Configuration::total_value() const {
  Satoshi sum = active_balance();
  for (const auto& [o, v] : deposits) sum += v;
  return sum;
}

std::string Configuration::key() const {
  std::ostringstream os;
  os << "i" << interval << "|";
  for (const auto& a : active)
    os << "A" << a.cid << "@" << path_to_string(a.prefix) << "=" << a.balance
       << ";";
  os << "|";
  for (const auto& [o, v] : deposits) os << "D" << o << "=" << v << ";";
  os << "|";
  for (const auto& [s, st] : secret_state) {
    os << "S" << s << "=";
    if (st)
      os << *st;
    else
      os << "c";
    os << ";";
  }
  os << "|";
  for (const auto& [p, path] : auths)
    os << "U" << p << "@" << path_to_string(path) << ";";
  return os.str();
}

bool operator==(const Move& a, const Move& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Delay>) return true;
        else if constexpr (std::is_same_v<T, RevealSecret>)
          return x.participant == y.participant && x.secret == y.secret &&
                 x.length == y.length;
        else if constexpr (std::is_same_v<T, Authorize>)
          return x.participant == y.participant && x.path == y.path;
        else
          return x.cid == y.cid && x.path == y.path;
      },
      a);
}

std::string to_string(const Move& m) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Delay>) {
          os << "delay";
        } else if constexpr (std::is_same_v<T, RevealSecret>) {
          os << "reveal " << x.participant << ":" << x.secret << " (len "
             << x.length << ")";
        } else if constexpr (std::is_same_v<T, Authorize>) {
          os << "auth " << x.participant << "@" << path_to_string(x.path);
        } else {
          os << "fire " << x.cid << "@" << path_to_string(x.path);
        }
      },
      m);
  return os.str();
}

SemanticsContext SemanticsContext::make(const ContractSpec& spec,
                                        std::map<std::string, int64_t> lengths) {
  SemanticsContext ctx;
  ctx.spec = &spec;
  ctx.partition.deadlines = spec.deadlines();
  ctx.lengths = std::move(lengths);
  return ctx;
}

Configuration initial_configuration(const SemanticsContext& ctx) {
  Configuration cfg;
  cfg.active.push_back({"c", {}, std::make_shared<Contract>(ctx.spec->contract),
                        ctx.spec->total_deposit_value()});
  for (const auto& s : ctx.spec->precondition.secrets)
    cfg.secret_state[s.name] = std::nullopt;
  return cfg;
}

namespace {

std::map<std::string, int64_t> revealed_lengths(const Configuration& cfg) {
  std::map<std::string, int64_t> out;
  for (const auto& [s, st] : cfg.secret_state)
    if (st) out[s] = *st;
  return out;
}

// Guards discharged and, for reveal branches, secrets revealed with the
// predicate holding.
bool branch_fireable(const Configuration& cfg, const Branch& b,
                     const BranchPath& absPath, const SemanticsContext& ctx) {
  for (const auto& g : b.guards) {
    if (auto* a = std::get_if<AfterGuard>(&g)) {
      if (ctx.partition.interval_start(cfg.interval) < a->height) return false;
    } else {
      const auto& auth = std::get<AuthGuard>(g);
      if (!cfg.auths.count({auth.authorizer, absPath})) return false;
    }
  }
  if (auto* reveal = std::get_if<Reveal>(&b.body)) {
    for (const auto& s : reveal->secrets) {
      auto it = cfg.secret_state.find(s);
      if (it == cfg.secret_state.end() || !it->second) return false;
    }
    if (reveal->predicate &&
        !eval_predicate(*reveal->predicate, revealed_lengths(cfg)))
      return false;
  }
  return true;
}

bool has_after_guard(const Branch& b) {
  return std::any_of(b.guards.begin(), b.guards.end(), [](const Guard& g) {
    return std::holds_alternative<AfterGuard>(g);
  });
}

std::vector<std::pair<BranchPath, const Branch*>> fireable_branches(
    const Configuration& cfg, const ActiveContract& a,
    const SemanticsContext& ctx) {
  std::vector<std::pair<BranchPath, const Branch*>> out;
  for (uint32_t i = 0; i < a.contract->branches.size(); ++i) {
    const Branch& b = a.contract->branches[i];
    BranchPath path = a.prefix;
    path.push_back(i);
    if (branch_fireable(cfg, b, path, ctx)) out.emplace_back(std::move(path), &b);
  }
  // Timeout branches yield to fireable unguarded siblings.
  bool anyImmediate = std::any_of(out.begin(), out.end(), [](const auto& p) {
    return !has_after_guard(*p.second);
  });
  if (anyImmediate) {
    std::erase_if(out, [](const auto& p) { return has_after_guard(*p.second); });
  }
  return out;
}

void aexpr_secrets(const AExpr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SecretLen>) out.insert(n.secret);
        else if constexpr (std::is_same_v<T, AAdd> || std::is_same_v<T, ASub>) {
          aexpr_secrets(*n.lhs, out);
          aexpr_secrets(*n.rhs, out);
        }
      },
      e.node);
}

void predicate_secrets(const Predicate& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PNot>) predicate_secrets(*n.inner, out);
        else if constexpr (std::is_same_v<T, PAnd> || std::is_same_v<T, POr>) {
          predicate_secrets(*n.lhs, out);
          predicate_secrets(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, PEq> || std::is_same_v<T, PLt>) {
          aexpr_secrets(*n.lhs, out);
          aexpr_secrets(*n.rhs, out);
        }
      },
      p.node);
}

void contract_secrets(const Contract& c, std::set<std::string>& out) {
  for (const Branch& b : c.branches) {
    if (const auto* r = std::get_if<Reveal>(&b.body)) {
      out.insert(r->secrets.begin(), r->secrets.end());
      if (r->predicate) predicate_secrets(*r->predicate, out);
      contract_secrets(*r->continuation, out);
    } else if (const auto* s = std::get_if<Split>(&b.body)) {
      for (const auto& arm : s->arms) contract_secrets(*arm.contract, out);
    }
  }
}

}  // namespace

std::vector<Move> enumerate_moves(const Configuration& cfg,
                                  const SemanticsContext& ctx) {
  std::vector<Move> moves;
  if (cfg.interval + 1 < ctx.partition.interval_count())
    moves.emplace_back(Delay{});

  // A reveal is only offered while some live subcontract can still consume
  // the secret; once nothing references it, revealing is a no-op and would
  // only blow up the state space.
  std::set<std::string> wanted;
  for (const auto& a : cfg.active) contract_secrets(*a.contract, wanted);
  for (const auto& [name, state] : cfg.secret_state) {
    if (state || !wanted.count(name)) continue;
    const SecretCommitment* sc = ctx.spec->find_secret(name);
    auto it = ctx.lengths.find(name);
    if (!sc || it == ctx.lengths.end()) continue;
    moves.emplace_back(RevealSecret{sc->owner, name, it->second});
  }

  std::set<std::pair<std::string, BranchPath>> authOffers;
  for (const auto& a : cfg.active) {
    for (uint32_t i = 0; i < a.contract->branches.size(); ++i) {
      const Branch& b = a.contract->branches[i];
      BranchPath path = a.prefix;
      path.push_back(i);
      for (const auto& g : b.guards) {
        if (auto* auth = std::get_if<AuthGuard>(&g)) {
          if (!cfg.auths.count({auth->authorizer, path}))
            authOffers.insert({auth->authorizer, path});
        }
      }
    }
  }
  for (const auto& [p, path] : authOffers) moves.emplace_back(Authorize{p, path});

  for (const auto& a : cfg.active)
    for (auto& [path, b] : fireable_branches(cfg, a, ctx))
      moves.emplace_back(Fire{a.cid, path});

  return moves;
}

namespace {

Configuration apply_unchecked(const Configuration& cfg, const Move& move,
                              const SemanticsContext& ctx) {
  Configuration next = cfg;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Delay>) {
          ++next.interval;
        } else if constexpr (std::is_same_v<T, RevealSecret>) {
          next.secret_state[m.secret] = m.length;
        } else if constexpr (std::is_same_v<T, Authorize>) {
          next.auths.insert({m.participant, m.path});
        } else {
          auto it = std::find_if(next.active.begin(), next.active.end(),
                                 [&](const ActiveContract& a) { return a.cid == m.cid; });
          if (it == next.active.end()) throw IllegalMoveError("no such contract");
          ActiveContract fired = *it;
          next.active.erase(it);
          uint32_t branchIdx = m.path.back();
          const Branch& b = fired.contract->branches.at(branchIdx);
          std::visit(
              [&](const auto& body) {
                using B = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<B, Withdraw>) {
                  next.deposits.emplace_back(body.recipient, fired.balance);
                  std::sort(next.deposits.begin(), next.deposits.end());
                } else if constexpr (std::is_same_v<B, Split>) {
                  for (uint32_t k = 0; k < body.arms.size(); ++k) {
                    ActiveContract child;
                    child.cid = fired.cid + "." + std::to_string(k);
                    child.prefix = m.path;
                    child.prefix.push_back(k);
                    child.contract = body.arms[k].contract;
                    child.balance = body.arms[k].value;
                    next.active.push_back(std::move(child));
                  }
                } else {
                  ActiveContract cont = fired;
                  cont.prefix = m.path;
                  cont.contract = body.continuation;
                  next.active.push_back(std::move(cont));
                }
              },
              b.body);
          std::sort(next.active.begin(), next.active.end(),
                    [](const ActiveContract& a, const ActiveContract& b2) {
                      return a.cid < b2.cid;
                    });
        }
      },
      move);
  return next;
}

}  // namespace

Configuration apply_move(const Configuration& cfg, const Move& move,
                         const SemanticsContext& ctx) {
  auto enabled = enumerate_moves(cfg, ctx);
  if (std::find(enabled.begin(), enabled.end(), move) == enabled.end())
    throw IllegalMoveError(to_string(move));
  return apply_unchecked(cfg, move, ctx);
}

Configuration apply_move_unchecked(const Configuration& cfg, const Move& move,
                                   const SemanticsContext& ctx) {
  return apply_unchecked(cfg, move, ctx);
}

bool atom_holds(const Configuration& cfg, const LTLAtom& atom) {
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AtomRevealed>) {
          auto it = cfg.secret_state.find(a.secret);
          return it != cfg.secret_state.end() && it->second.has_value();
        } else if constexpr (std::is_same_v<T, AtomHasDeposit>) {
          return cfg.deposit_balance(a.participant) >= a.min;
        } else if constexpr (std::is_same_v<T, AtomAuthorized>) {
          return cfg.auths.count({a.participant, a.path}) > 0;
        } else {
          return cfg.active.empty();
        }
      },
      atom);
}

}  // namespace bitml
