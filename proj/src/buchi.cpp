#include "bitml/buchi.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bitml {

namespace {

NnfPtr mk(NnfFormula f) { return std::make_shared<NnfFormula>(std::move(f)); }

}  // namespace

NnfPtr to_nnf(const LTLFormula& f, bool negate) {
  return std::visit(
      [&](const auto& x) -> NnfPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LTrue>) {
          return negate ? mk({NnfFalse{}}) : mk({NnfTrue{}});
        } else if constexpr (std::is_same_v<T, LFalse>) {
          return negate ? mk({NnfTrue{}}) : mk({NnfFalse{}});
        } else if constexpr (std::is_same_v<T, LAtomNode>) {
          return mk({NnfLit{x.atom, negate}});
        } else if constexpr (std::is_same_v<T, LNot>) {
          return to_nnf(*x.inner, !negate);
        } else if constexpr (std::is_same_v<T, LAnd>) {
          auto l = to_nnf(*x.lhs, negate);
          auto r = to_nnf(*x.rhs, negate);
          return negate ? mk({NnfOr{l, r}}) : mk({NnfAnd{l, r}});
        } else if constexpr (std::is_same_v<T, LOr>) {
          auto l = to_nnf(*x.lhs, negate);
          auto r = to_nnf(*x.rhs, negate);
          return negate ? mk({NnfAnd{l, r}}) : mk({NnfOr{l, r}});
        } else if constexpr (std::is_same_v<T, LImplies>) {
          // a => b == !a \/ b
          auto l = to_nnf(*x.lhs, !negate);
          auto r = to_nnf(*x.rhs, negate);
          return negate ? mk({NnfAnd{l, r}}) : mk({NnfOr{l, r}});
        } else if constexpr (std::is_same_v<T, LNext>) {
          return mk({NnfNext{to_nnf(*x.inner, negate)}});
        } else if constexpr (std::is_same_v<T, LUntil>) {
          auto l = to_nnf(*x.lhs, negate);
          auto r = to_nnf(*x.rhs, negate);
          return negate ? mk({NnfRelease{l, r}}) : mk({NnfUntil{l, r}});
        } else if constexpr (std::is_same_v<T, LRelease>) {
          auto l = to_nnf(*x.lhs, negate);
          auto r = to_nnf(*x.rhs, negate);
          return negate ? mk({NnfUntil{l, r}}) : mk({NnfRelease{l, r}});
        } else if constexpr (std::is_same_v<T, LGlobally>) {
          // G p == false R p ; !G p == true U !p
          auto inner = to_nnf(*x.inner, negate);
          return negate ? mk({NnfUntil{mk({NnfTrue{}}), inner}})
                        : mk({NnfRelease{mk({NnfFalse{}}), inner}});
        } else {
          // F p == true U p ; !F p == false R !p
          auto inner = to_nnf(*x.inner, negate);
          return negate ? mk({NnfRelease{mk({NnfFalse{}}), inner}})
                        : mk({NnfUntil{mk({NnfTrue{}}), inner}});
        }
      },
      f.node);
}

std::string nnf_key(const NnfFormula& f) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NnfTrue>) os << "1";
        else if constexpr (std::is_same_v<T, NnfFalse>) os << "0";
        else if constexpr (std::is_same_v<T, NnfLit>)
          os << (x.negated ? "~" : "") << "[" << to_string(x.atom) << "]";
        else if constexpr (std::is_same_v<T, NnfAnd>)
          os << "(&" << nnf_key(*x.lhs) << nnf_key(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, NnfOr>)
          os << "(|" << nnf_key(*x.lhs) << nnf_key(*x.rhs) << ")";
        else if constexpr (std::is_same_v<T, NnfNext>)
          os << "(X" << nnf_key(*x.inner) << ")";
        else if constexpr (std::is_same_v<T, NnfUntil>)
          os << "(U" << nnf_key(*x.lhs) << nnf_key(*x.rhs) << ")";
        else
          os << "(R" << nnf_key(*x.lhs) << nnf_key(*x.rhs) << ")";
      },
      f.node);
  return os.str();
}

namespace {

// Tableau nodes manipulate formula sets keyed by their canonical string.
using FormulaSet = std::map<std::string, NnfPtr>;

bool contains(const FormulaSet& s, const std::string& k) { return s.count(k) > 0; }

void insert(FormulaSet& s, const NnfPtr& f) { s.emplace(nnf_key(*f), f); }

struct TableauNode {
  int id = 0;
  std::set<int> incoming;
  FormulaSet news, old, next;
};

struct Expander {
  std::vector<TableauNode> done;
  int next_id = 1;

  void expand(TableauNode node) {
    if (node.news.empty()) {
      for (auto& nd : done) {
        if (nd.old == node.old && nd.next == node.next) {
          nd.incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      }
      done.push_back(node);
      TableauNode succ;
      succ.id = next_id++;
      succ.incoming = {node.id};
      succ.news = node.next;
      expand(std::move(succ));
      return;
    }
    auto it = node.news.begin();
    NnfPtr f = it->second;
    std::string k = it->first;
    node.news.erase(it);

    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, NnfFalse>) {
            // contradiction: drop the node
          } else if constexpr (std::is_same_v<T, NnfTrue>) {
            expand(std::move(node));
          } else if constexpr (std::is_same_v<T, NnfLit>) {
            NnfLit dual = x;
            dual.negated = !dual.negated;
            if (contains(node.old, nnf_key(NnfFormula{dual}))) return;
            node.old.emplace(k, f);
            expand(std::move(node));
          } else if constexpr (std::is_same_v<T, NnfAnd>) {
            node.old.emplace(k, f);
            if (!contains(node.old, nnf_key(*x.lhs))) insert(node.news, x.lhs);
            if (!contains(node.old, nnf_key(*x.rhs))) insert(node.news, x.rhs);
            expand(std::move(node));
          } else if constexpr (std::is_same_v<T, NnfNext>) {
            node.old.emplace(k, f);
            insert(node.next, x.inner);
            expand(std::move(node));
          } else {
            // Or / Until / Release split into two nodes.
            TableauNode n1 = node, n2 = node;
            n1.old.emplace(k, f);
            n2.old.emplace(k, f);
            if constexpr (std::is_same_v<T, NnfOr>) {
              if (!contains(n1.old, nnf_key(*x.lhs))) insert(n1.news, x.lhs);
              if (!contains(n2.old, nnf_key(*x.rhs))) insert(n2.news, x.rhs);
            } else if constexpr (std::is_same_v<T, NnfUntil>) {
              if (!contains(n1.old, nnf_key(*x.lhs))) insert(n1.news, x.lhs);
              insert(n1.next, f);
              if (!contains(n2.old, nnf_key(*x.rhs))) insert(n2.news, x.rhs);
            } else {  // Release: n1 keeps the obligation, n2 discharges it
              if (!contains(n1.old, nnf_key(*x.rhs))) insert(n1.news, x.rhs);
              insert(n1.next, f);
              if (!contains(n2.old, nnf_key(*x.lhs))) insert(n2.news, x.lhs);
              if (!contains(n2.old, nnf_key(*x.rhs))) insert(n2.news, x.rhs);
            }
            expand(std::move(n1));
            expand(std::move(n2));
          }
        },
        f->node);
  }
};

void collect_untils(const NnfPtr& f, std::vector<NnfPtr>& out,
                    std::set<std::string>& seen) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NnfUntil>) {
          if (seen.insert(nnf_key(*f)).second) out.push_back(f);
          collect_untils(x.lhs, out, seen);
          collect_untils(x.rhs, out, seen);
        } else if constexpr (std::is_same_v<T, NnfRelease> ||
                             std::is_same_v<T, NnfAnd> ||
                             std::is_same_v<T, NnfOr>) {
          collect_untils(x.lhs, out, seen);
          collect_untils(x.rhs, out, seen);
        } else if constexpr (std::is_same_v<T, NnfNext>) {
          collect_untils(x.inner, out, seen);
        }
      },
      f->node);
}

}  // namespace

BuchiAutomaton ltl_to_buchi(const NnfPtr& formula) {
  Expander ex;
  TableauNode init;
  init.id = ex.next_id++;
  init.incoming = {-1};
  insert(init.news, formula);
  ex.expand(std::move(init));

  std::vector<NnfPtr> untils;
  std::set<std::string> seen;
  collect_untils(formula, untils, seen);

  BuchiAutomaton aut;
  aut.acceptance_sets = untils.size();
  std::map<int, size_t> idmap;
  for (const auto& nd : ex.done) idmap[nd.id] = aut.nodes.size(),
                                 aut.nodes.emplace_back();
  for (size_t i = 0; i < ex.done.size(); ++i) {
    const auto& nd = ex.done[i];
    auto& out = aut.nodes[i];
    for (const auto& [k, f] : nd.old)
      if (auto* lit = std::get_if<NnfLit>(&f->node)) out.literals.push_back(*lit);
    for (int in : nd.incoming) {
      if (in == -1) {
        out.incoming.insert(-1);
      } else {
        auto it = idmap.find(in);
        if (it != idmap.end()) out.incoming.insert(int(it->second));
      }
    }
    for (size_t u = 0; u < untils.size(); ++u) {
      const auto& until = std::get<NnfUntil>(untils[u]->node);
      std::string uk = nnf_key(*untils[u]);
      std::string rk = nnf_key(*until.rhs);
      if (!nd.old.count(uk) || nd.old.count(rk)) out.accepting_in.push_back(u);
    }
  }
  return aut;
}

}  // namespace bitml
