#include "bitml/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace bitml {

namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& reason,
                       const std::string& expected = "") {
  throw ParseError(at.line, at.column, reason, expected);
}

bool is_form(const SExpr& e, const std::string& head) {
  if (!e.is_list() || e.list().items.empty()) return false;
  const SExpr& h = e.list().items[0];
  return !h.is_list() && !h.atom().is_string && h.atom().text == head;
}

const std::string& expect_string(const SExpr& e, const std::string& what) {
  if (e.is_list() || !e.atom().is_string) fail(e, "expected quoted " + what, "STRING");
  return e.atom().text;
}

int64_t expect_int(const SExpr& e, const std::string& what) {
  if (e.is_list() || !e.atom().is_int) fail(e, "expected " + what, "INT");
  return e.atom().value;
}

const std::string& expect_ident(const SExpr& e, const std::string& what) {
  if (e.is_list() || e.atom().is_string) fail(e, "expected " + what, "IDENT");
  return e.atom().text;
}

bool is_hex(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isxdigit(static_cast<unsigned char>(c));
  });
}

// Hex blobs may lex as symbols or (rarely) as integers; use the raw text.
std::string expect_hex(const SExpr& e, size_t nchars, const std::string& what) {
  if (e.is_list() || e.atom().is_string) fail(e, "expected " + what, "HEX");
  const std::string& t = e.atom().text;
  if (t.size() != nchars || !is_hex(t))
    fail(e, what + " must be " + std::to_string(nchars) + " hex characters");
  std::string lower = t;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower;
}

Outpoint parse_outpoint(const SExpr& e) {
  if (!is_form(e, "outpoint") || e.list().items.size() != 3)
    fail(e, "malformed outpoint", "(outpoint HEXTXID INT)");
  Outpoint o;
  o.txid = expect_hex(e.list().items[1], 64, "txid");
  int64_t v = expect_int(e.list().items[2], "vout");
  if (v < 0) fail(e.list().items[2], "vout must be non-negative");
  o.vout = static_cast<uint32_t>(v);
  return o;
}

AExprPtr parse_aexpr(const SExpr& e) {
  if (!e.is_list()) {
    if (e.atom().is_int) return aconst(e.atom().value);
    fail(e, "expected arithmetic expression", "INT or (len ...) or (+/-)");
  }
  const auto& items = e.list().items;
  if (items.empty()) fail(e, "empty arithmetic expression");
  const std::string& head = expect_ident(items[0], "operator");
  if (head == "len") {
    if (items.size() != 2) fail(e, "len takes one secret name");
    return alen(expect_ident(items[1], "secret name"));
  }
  if (head == "+" || head == "-") {
    if (items.size() != 3) fail(e, head + " takes two operands");
    auto l = parse_aexpr(items[1]);
    auto r = parse_aexpr(items[2]);
    return head == "+" ? aadd(l, r) : asub(l, r);
  }
  fail(e, "unknown arithmetic operator '" + head + "'", "len, + or -");
}

PredicatePtr parse_pexp(const SExpr& e) {
  if (!e.is_list()) {
    if (!e.atom().is_string && e.atom().text == "true") return ptrue();
    fail(e, "expected predicate", "true or a compound predicate");
  }
  const auto& items = e.list().items;
  if (items.empty()) fail(e, "empty predicate");
  const std::string& head = expect_ident(items[0], "predicate operator");
  if (head == "not") {
    if (items.size() != 2) fail(e, "not takes one predicate");
    return pnot(parse_pexp(items[1]));
  }
  if (head == "and" || head == "or") {
    if (items.size() != 3) fail(e, head + " takes two predicates");
    auto l = parse_pexp(items[1]);
    auto r = parse_pexp(items[2]);
    return head == "and" ? pand(l, r) : por(l, r);
  }
  if (head == "=" || head == "<") {
    if (items.size() != 3) fail(e, head + " takes two expressions");
    auto l = parse_aexpr(items[1]);
    auto r = parse_aexpr(items[2]);
    return head == "=" ? peq(l, r) : plt(l, r);
  }
  fail(e, "unknown predicate operator '" + head + "'", "not, and, or, = or <");
}

Contract parse_contract_node(const SExpr& e);

Branch parse_branch(const SExpr& e) {
  if (!e.is_list() || e.list().items.empty()) fail(e, "expected a branch form");
  const auto& items = e.list().items;
  const std::string& head = expect_ident(items[0], "branch keyword");

  if (head == "withdraw") {
    if (items.size() != 2) fail(e, "withdraw takes a participant");
    return Branch{{}, Withdraw{expect_string(items[1], "participant")}};
  }
  if (head == "split") {
    if (items.size() < 2) fail(e, "split needs at least one arm");
    Split split;
    for (size_t i = 1; i < items.size(); ++i) {
      const SExpr& armE = items[i];
      if (!armE.is_list() || armE.list().items.size() != 3)
        fail(armE, "malformed split arm", "(INT -> contract)");
      const auto& arm = armE.list().items;
      Satoshi v = expect_int(arm[0], "arm value");
      if (v <= 0) fail(arm[0], "arm value must be positive");
      if (arm[1].is_list() || arm[1].atom().text != "->")
        fail(arm[1], "expected '->' in split arm", "->");
      split.arms.push_back(
          {v, std::make_shared<Contract>(parse_contract_node(arm[2]))});
    }
    return Branch{{}, std::move(split)};
  }
  if (head == "auth") {
    if (items.size() != 3) fail(e, "auth takes a participant and a branch");
    Branch inner = parse_branch(items[2]);
    inner.guards.insert(inner.guards.begin(),
                        AuthGuard{expect_string(items[1], "participant")});
    return inner;
  }
  if (head == "after") {
    if (items.size() != 3) fail(e, "after takes a height and a branch");
    int64_t h = expect_int(items[1], "block height");
    if (h <= 0) fail(items[1], "block height must be positive");
    Branch inner = parse_branch(items[2]);
    inner.guards.insert(inner.guards.begin(), AfterGuard{h});
    return inner;
  }
  if (head == "reveal") {
    if (items.size() < 3) fail(e, "reveal takes a secret list and a contract");
    if (!items[1].is_list() || items[1].list().items.empty())
      fail(items[1], "reveal needs a nonempty secret list", "(IDENT+)");
    Reveal reveal;
    for (const auto& s : items[1].list().items)
      reveal.secrets.push_back(expect_ident(s, "secret name"));
    size_t contIdx = 2;
    if (is_form(items[2], "pred")) {
      if (items[2].list().items.size() != 2)
        fail(items[2], "pred takes one predicate");
      reveal.predicate = parse_pexp(items[2].list().items[1]);
      contIdx = 3;
    }
    if (items.size() != contIdx + 1)
      fail(e, "reveal takes exactly one continuation contract");
    reveal.continuation =
        std::make_shared<Contract>(parse_contract_node(items[contIdx]));
    return Branch{{}, std::move(reveal)};
  }
  fail(e, "unknown branch form '" + head + "'",
       "withdraw, split, auth, after or reveal");
}

Contract parse_contract_node(const SExpr& e) {
  if (is_form(e, "choice")) {
    const auto& items = e.list().items;
    if (items.size() < 2) fail(e, "choice needs at least one branch");
    Contract c;
    for (size_t i = 1; i < items.size(); ++i)
      c.branches.push_back(parse_branch(items[i]));
    return c;
  }
  Contract c;
  c.branches.push_back(parse_branch(e));
  return c;
}

Precondition parse_pre(const SExpr& e) {
  if (!is_form(e, "pre")) fail(e, "expected precondition", "(pre ...)");
  Precondition pre;
  const auto& items = e.list().items;
  for (size_t i = 1; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (is_form(item, "deposit") || is_form(item, "fee")) {
      const auto& d = item.list().items;
      if (d.size() != 4)
        fail(item, "malformed deposit", "(deposit STRING INT outpoint)");
      DepositItem dep;
      dep.owner = expect_string(d[1], "owner");
      dep.value = expect_int(d[2], "value");
      if (dep.value <= 0) fail(d[2], "deposit value must be positive");
      dep.outpoint = parse_outpoint(d[3]);
      if (is_form(item, "deposit"))
        pre.persistent_deposits.push_back(std::move(dep));
      else
        pre.fee_deposits.push_back(std::move(dep));
    } else if (is_form(item, "secret")) {
      const auto& s = item.list().items;
      if (s.size() != 4)
        fail(item, "malformed secret", "(secret STRING IDENT HEXHASH)");
      SecretCommitment sc;
      sc.owner = expect_string(s[1], "owner");
      sc.name = expect_ident(s[2], "secret name");
      sc.hash = expect_hex(s[3], 64, "secret hash");
      pre.secrets.push_back(std::move(sc));
    } else {
      fail(item, "unknown precondition item", "deposit, fee or secret");
    }
  }
  return pre;
}

BranchPath parse_bpath(const SExpr& e) {
  if (!is_form(e, "branch") || e.list().items.size() < 2)
    fail(e, "expected branch path", "(branch INT+)");
  BranchPath path;
  for (size_t i = 1; i < e.list().items.size(); ++i) {
    int64_t v = expect_int(e.list().items[i], "branch index");
    if (v < 0) fail(e.list().items[i], "branch index must be non-negative");
    path.push_back(static_cast<uint32_t>(v));
  }
  return path;
}

CondPtr parse_cond(const SExpr& e) {
  if (!e.is_list() || e.list().items.empty()) fail(e, "expected condition");
  const auto& items = e.list().items;
  const std::string& head = expect_ident(items[0], "condition keyword");
  if (head == "revealed") {
    if (items.size() != 2) fail(e, "revealed takes one secret name");
    return std::make_shared<Cond>(
        Cond{CondRevealed{expect_ident(items[1], "secret name")}});
  }
  if (head == "authorized") {
    if (items.size() != 3) fail(e, "authorized takes a participant and a path");
    return std::make_shared<Cond>(Cond{CondAuthorized{
        expect_string(items[1], "participant"), parse_bpath(items[2])}});
  }
  if (head == "time>=") {
    if (items.size() != 2) fail(e, "time>= takes a height");
    return std::make_shared<Cond>(
        Cond{CondTimeReached{expect_int(items[1], "height")}});
  }
  if (head == "and") {
    if (items.size() != 3) fail(e, "and takes two conditions");
    return std::make_shared<Cond>(
        Cond{CondAnd{parse_cond(items[1]), parse_cond(items[2])}});
  }
  fail(e, "unknown condition '" + head + "'",
       "revealed, authorized, time>= or and");
}

Strategy parse_strategy_form(const SExpr& e) {
  if (!is_form(e, "strategy")) fail(e, "expected strategy", "(strategy ...)");
  const auto& items = e.list().items;
  if (items.size() != 3 && items.size() != 4)
    fail(e, "malformed strategy", "(strategy STRING action (if cond)?)");
  Strategy s;
  s.participant = expect_string(items[1], "participant");
  StrategyRule rule;
  const SExpr& act = items[2];
  if (is_form(act, "do-reveal")) {
    if (act.list().items.size() != 2) fail(act, "do-reveal takes a secret name");
    rule.action = RevealAction{expect_ident(act.list().items[1], "secret name")};
  } else if (is_form(act, "do-auth")) {
    if (act.list().items.size() != 2) fail(act, "do-auth takes a branch path");
    rule.action = AuthAction{parse_bpath(act.list().items[1])};
  } else {
    fail(act, "unknown strategy action", "do-reveal or do-auth");
  }
  if (items.size() == 4) {
    if (!is_form(items[3], "if") || items[3].list().items.size() != 2)
      fail(items[3], "malformed condition", "(if cond)");
    rule.condition = parse_cond(items[3].list().items[1]);
  }
  s.rules.push_back(std::move(rule));
  return s;
}

ParsedFile parse_forms(const std::vector<SExpr>& forms) {
  ParsedFile out;
  bool sawContract = false;
  for (const SExpr& form : forms) {
    if (is_form(form, "participant")) {
      const auto& items = form.list().items;
      if (items.size() != 3)
        fail(form, "malformed participant", "(participant STRING HEXPUBKEY)");
      Participant p;
      p.name = expect_string(items[1], "participant name");
      p.pubkey = expect_hex(items[2], 66, "pubkey");
      out.spec.participants.push_back(std::move(p));
    } else if (is_form(form, "contract")) {
      if (sawContract) fail(form, "only one contract form is allowed");
      sawContract = true;
      const auto& items = form.list().items;
      if (items.size() != 3)
        fail(form, "malformed contract", "(contract pre contract-body)");
      out.spec.precondition = parse_pre(items[1]);
      out.spec.contract = parse_contract_node(items[2]);
    } else if (is_form(form, "strategy")) {
      Strategy s = parse_strategy_form(form);
      auto it = std::find_if(
          out.strategies.begin(), out.strategies.end(),
          [&](const Strategy& x) { return x.participant == s.participant; });
      if (it == out.strategies.end())
        out.strategies.push_back(std::move(s));
      else
        it->rules.insert(it->rules.end(), s.rules.begin(), s.rules.end());
    } else if (is_form(form, "check-liquid")) {
      out.queries.push_back({Query::Kind::Liquidity, ""});
    } else if (is_form(form, "check-query")) {
      const auto& items = form.list().items;
      if (items.size() != 2)
        fail(form, "malformed query", "(check-query STRING)");
      out.queries.push_back(
          {Query::Kind::Ltl, expect_string(items[1], "LTL formula")});
    } else {
      fail(form, "unknown top-level form",
           "participant, contract, strategy, check-liquid or check-query");
    }
  }
  if (!sawContract && !forms.empty())
    fail(forms.back(), "missing contract form");
  if (forms.empty()) throw ParseError(1, 1, "empty input", "contract file");
  return out;
}

}  // namespace

ParsedFile parse_file(const SourceFile& src) {
  return parse_forms(read_sexprs(src.text));
}

ContractSpec parse_contract(const SourceFile& src) {
  return parse_file(src).spec;
}

Strategy parse_strategy(const std::string& text) {
  auto forms = read_sexprs(text);
  if (forms.size() != 1) throw ParseError(1, 1, "expected one strategy form");
  return parse_strategy_form(forms[0]);
}

std::vector<Strategy> parse_strategies(const std::string& text) {
  std::vector<Strategy> out;
  for (const SExpr& form : read_sexprs(text)) {
    Strategy s = parse_strategy_form(form);
    auto it = std::find_if(
        out.begin(), out.end(),
        [&](const Strategy& x) { return x.participant == s.participant; });
    if (it == out.end())
      out.push_back(std::move(s));
    else
      it->rules.insert(it->rules.end(), s.rules.begin(), s.rules.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// LTL concrete syntax: [], <>, X, U, =>, \/, /\, ! plus the atom forms
//   <ident> revealed
//   <ident> has-deposit>= INT satoshi
//   <ident> authorized (branch INT+)
//   contract-terminated

namespace {

struct LtlToken {
  enum Kind { Sym, Ident, Int, End } kind = End;
  std::string text;
  int64_t value = 0;
  int column = 0;
};

std::vector<LtlToken> ltl_lex(const std::string& text) {
  std::vector<LtlToken> toks;
  size_t i = 0;
  auto push = [&](LtlToken::Kind k, std::string t, int64_t v, size_t at) {
    toks.push_back({k, std::move(t), v, int(at) + 1});
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "[]" || two == "<>" || two == "=>" || two == "\\/" ||
        two == "/\\") {
      push(LtlToken::Sym, two, 0, i);
      i += 2;
      continue;
    }
    if (c == '!' || c == '(' || c == ')') {
      push(LtlToken::Sym, std::string(1, c), 0, i);
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      push(LtlToken::Int, text.substr(i, j - i),
           std::stoll(text.substr(i, j - i)), i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_' || text[j] == '-'))
        ++j;
      std::string word = text.substr(i, j - i);
      // has-deposit glues its comparison operator on.
      if (word == "has-deposit" && text.substr(j, 2) == ">=") {
        word = "has-deposit>=";
        j += 2;
      }
      push(LtlToken::Ident, word, 0, i);
      i = j;
      continue;
    }
    throw ParseError(1, int(i) + 1, std::string("unexpected character '") + c +
                                        "' in LTL formula");
  }
  push(LtlToken::End, "", 0, text.size());
  return toks;
}

struct LtlParser {
  std::vector<LtlToken> toks;
  size_t pos = 0;

  const LtlToken& peek() const { return toks[pos]; }
  LtlToken take() { return toks[pos++]; }

  [[noreturn]] void fail(const std::string& reason,
                         const std::string& expected = "") {
    throw ParseError(1, peek().column, reason, expected);
  }

  bool eat_sym(const std::string& s) {
    if (peek().kind == LtlToken::Sym && peek().text == s) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_ident(const std::string& s) {
    if (peek().kind == LtlToken::Ident && peek().text == s) {
      ++pos;
      return true;
    }
    return false;
  }

  // => (loosest, right assoc) < \/ < /\ < U < unary (!, [], <>, X)
  LTLPtr parse_implies() {
    LTLPtr l = parse_or();
    if (eat_sym("=>")) return limplies(l, parse_implies());
    return l;
  }

  LTLPtr parse_or() {
    LTLPtr l = parse_and();
    while (eat_sym("\\/")) l = lor(l, parse_and());
    return l;
  }

  LTLPtr parse_and() {
    LTLPtr l = parse_until();
    while (eat_sym("/\\")) l = land(l, parse_until());
    return l;
  }

  LTLPtr parse_until() {
    LTLPtr l = parse_unary();
    if (eat_ident("U")) return luntil(l, parse_until());
    return l;
  }

  LTLPtr parse_unary() {
    if (eat_sym("!")) return lnot(parse_unary());
    if (eat_sym("[]")) return lglobally(parse_unary());
    if (eat_sym("<>")) return lfinally(parse_unary());
    if (eat_ident("X")) return lnext(parse_unary());
    return parse_primary();
  }

  BranchPath parse_branch_path() {
    if (!eat_sym("(")) fail("expected branch path", "(branch INT+)");
    if (!eat_ident("branch")) fail("expected 'branch'", "branch");
    BranchPath path;
    while (peek().kind == LtlToken::Int)
      path.push_back(static_cast<uint32_t>(take().value));
    if (path.empty()) fail("branch path needs at least one index", "INT");
    if (!eat_sym(")")) fail("unclosed branch path", ")");
    return path;
  }

  LTLPtr parse_primary() {
    if (eat_sym("(")) {
      LTLPtr inner = parse_implies();
      if (!eat_sym(")")) fail("unclosed parenthesis", ")");
      return inner;
    }
    if (peek().kind != LtlToken::Ident)
      fail("expected an atom or '('", "atom");
    std::string id = take().text;
    if (id == "true") return ltrue();
    if (id == "false") return lfalse();
    if (id == "contract-terminated") return latom(AtomTerminated{});
    if (eat_ident("revealed")) return latom(AtomRevealed{id});
    if (peek().kind == LtlToken::Ident && peek().text == "has-deposit>=") {
      ++pos;
      if (peek().kind != LtlToken::Int) fail("expected satoshi amount", "INT");
      Satoshi n = take().value;
      if (!eat_ident("satoshi")) fail("expected 'satoshi'", "satoshi");
      return latom(AtomHasDeposit{id, n});
    }
    if (eat_ident("authorized"))
      return latom(AtomAuthorized{id, parse_branch_path()});
    fail("malformed atom after '" + id + "'",
         "revealed, has-deposit>= or authorized");
  }
};

}  // namespace

LTLPtr parse_ltl(const std::string& text) {
  LtlParser p{ltl_lex(text)};
  LTLPtr f = p.parse_implies();
  if (p.peek().kind != LtlToken::End)
    p.fail("trailing input after formula");
  return f;
}

// ---------------------------------------------------------------------------
// Pretty printer

namespace {

void print_aexpr(std::ostream& os, const AExpr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntConst>) {
          os << x.value;
        } else if constexpr (std::is_same_v<T, SecretLen>) {
          os << "(len " << x.secret << ")";
        } else if constexpr (std::is_same_v<T, AAdd>) {
          os << "(+ ";
          print_aexpr(os, *x.lhs);
          os << " ";
          print_aexpr(os, *x.rhs);
          os << ")";
        } else {
          os << "(- ";
          print_aexpr(os, *x.lhs);
          os << " ";
          print_aexpr(os, *x.rhs);
          os << ")";
        }
      },
      e.node);
}

void print_pexp(std::ostream& os, const Predicate& p) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PTrue>) {
          os << "true";
        } else if constexpr (std::is_same_v<T, PNot>) {
          os << "(not ";
          print_pexp(os, *x.inner);
          os << ")";
        } else if constexpr (std::is_same_v<T, PAnd> || std::is_same_v<T, POr>) {
          os << (std::is_same_v<T, PAnd> ? "(and " : "(or ");
          print_pexp(os, *x.lhs);
          os << " ";
          print_pexp(os, *x.rhs);
          os << ")";
        } else {
          os << (std::is_same_v<T, PEq> ? "(= " : "(< ");
          print_aexpr(os, *x.lhs);
          os << " ";
          print_aexpr(os, *x.rhs);
          os << ")";
        }
      },
      p.node);
}

void print_contract(std::ostream& os, const Contract& c, int indent);

void print_branch(std::ostream& os, const Branch& b, int indent) {
  std::string pad(indent, ' ');
  size_t open = 0;
  for (const auto& g : b.guards) {
    if (auto* a = std::get_if<AuthGuard>(&g))
      os << "(auth \"" << a->authorizer << "\" ";
    else
      os << "(after " << std::get<AfterGuard>(g).height << " ";
    ++open;
  }
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Withdraw>) {
          os << "(withdraw \"" << body.recipient << "\")";
        } else if constexpr (std::is_same_v<T, Split>) {
          os << "(split";
          for (const auto& arm : body.arms) {
            os << "\n" << pad << "  (" << arm.value << " -> ";
            print_contract(os, *arm.contract, indent + 4);
            os << ")";
          }
          os << ")";
        } else {
          os << "(reveal (";
          for (size_t i = 0; i < body.secrets.size(); ++i) {
            if (i) os << " ";
            os << body.secrets[i];
          }
          os << ")";
          if (body.predicate) {
            os << " (pred ";
            print_pexp(os, *body.predicate);
            os << ")";
          }
          os << "\n" << pad << "  ";
          print_contract(os, *body.continuation, indent + 2);
          os << ")";
        }
      },
      b.body);
  for (size_t i = 0; i < open; ++i) os << ")";
}

void print_contract(std::ostream& os, const Contract& c, int indent) {
  if (c.branches.size() == 1) {
    print_branch(os, c.branches[0], indent);
    return;
  }
  std::string pad(indent, ' ');
  os << "(choice";
  for (const auto& b : c.branches) {
    os << "\n" << pad << "  ";
    print_branch(os, b, indent + 2);
  }
  os << ")";
}

}  // namespace

std::string pretty_print(const ContractSpec& spec) {
  std::ostringstream os;
  for (const auto& p : spec.participants)
    os << "(participant \"" << p.name << "\" " << p.pubkey << ")\n";
  os << "(contract\n  (pre";
  for (const auto& d : spec.precondition.persistent_deposits)
    os << "\n    (deposit \"" << d.owner << "\" " << d.value << " (outpoint "
       << d.outpoint.txid << " " << d.outpoint.vout << "))";
  for (const auto& s : spec.precondition.secrets)
    os << "\n    (secret \"" << s.owner << "\" " << s.name << " " << s.hash
       << ")";
  for (const auto& d : spec.precondition.fee_deposits)
    os << "\n    (fee \"" << d.owner << "\" " << d.value << " (outpoint "
       << d.outpoint.txid << " " << d.outpoint.vout << "))";
  os << ")\n  ";
  print_contract(os, spec.contract, 2);
  os << ")\n";
  return os.str();
}

}  // namespace bitml
