#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>

#include "bitml/ast.hpp"
#include "doctest.h"

using namespace bitml;

namespace {

ContractSpec two_party_spec() {
  ContractSpec spec;
  spec.participants = {{"A", "02" + std::string(64, 'a')},
                       {"B", "02" + std::string(64, 'b')}};
  spec.precondition.persistent_deposits = {
      {"A", 100, {std::string(64, '1'), 0}},
      {"B", 200, {std::string(64, '2'), 0}}};
  spec.precondition.fee_deposits = {{"A", 10, {std::string(64, '3'), 0}}};
  spec.precondition.secrets = {{"A", "a", std::string(64, '4')},
                               {"B", "b", std::string(64, '5')}};
  spec.contract.branches.push_back(Branch{{}, Withdraw{"A"}});
  return spec;
}

bool has_kind(const std::vector<StaticError>& errs, StaticErrorKind k) {
  return std::any_of(errs.begin(), errs.end(),
                     [&](const StaticError& e) { return e.kind == k; });
}

}  // namespace

TEST_CASE("predicate evaluation agrees with a direct oracle") {
  // p(a,b) = (a + 1 = b) or (not (a < 2) and b < 3)
  auto p = por(peq(aadd(alen("a"), aconst(1)), alen("b")),
               pand(pnot(plt(alen("a"), aconst(2))), plt(alen("b"), aconst(3))));
  for (int64_t a = 0; a <= 4; ++a) {
    for (int64_t b = 0; b <= 4; ++b) {
      bool expected = (a + 1 == b) || (!(a < 2) && b < 3);
      CHECK(eval_predicate(*p, {{"a", a}, {"b", b}}) == expected);
    }
  }
}

TEST_CASE("unbound secret in a predicate throws") {
  auto p = peq(alen("missing"), aconst(0));
  CHECK_THROWS(eval_predicate(*p, {}));
}

TEST_CASE("well-formed spec passes static checks") {
  CHECK(check_static(two_party_spec()).empty());
}

TEST_CASE("duplicate secret hash is reported") {
  auto spec = two_party_spec();
  spec.precondition.secrets[1].hash = spec.precondition.secrets[0].hash;
  CHECK(has_kind(check_static(spec), StaticErrorKind::DuplicateSecretHash));
}

TEST_CASE("duplicate secret name is reported") {
  auto spec = two_party_spec();
  spec.precondition.secrets[1].name = "a";
  CHECK(has_kind(check_static(spec), StaticErrorKind::DuplicateSecretName));
}

TEST_CASE("duplicate outpoint is reported") {
  auto spec = two_party_spec();
  spec.precondition.persistent_deposits[1].outpoint =
      spec.precondition.persistent_deposits[0].outpoint;
  CHECK(has_kind(check_static(spec), StaticErrorKind::DuplicateOutpoint));
}

TEST_CASE("unknown participant and secret are reported") {
  auto spec = two_party_spec();
  spec.contract.branches[0] = Branch{{}, Withdraw{"Z"}};
  CHECK(has_kind(check_static(spec), StaticErrorKind::UnknownParticipant));

  spec = two_party_spec();
  Reveal r;
  r.secrets = {"nosuch"};
  r.continuation = std::make_shared<Contract>(spec.contract);
  spec.contract.branches[0] = Branch{{}, std::move(r)};
  CHECK(has_kind(check_static(spec), StaticErrorKind::UnknownSecret));
}

TEST_CASE("split arms must tile the incoming balance") {
  auto spec = two_party_spec();
  Split split;
  split.arms.push_back(
      {100, std::make_shared<Contract>(Contract{{Branch{{}, Withdraw{"A"}}}})});
  split.arms.push_back(
      {150, std::make_shared<Contract>(Contract{{Branch{{}, Withdraw{"B"}}}})});
  spec.contract.branches[0] = Branch{{}, std::move(split)};
  // deposits total 300, arms total 250
  CHECK(has_kind(check_value_flow(spec), StaticErrorKind::ValueFlowMismatch));

  // fix the arm values and the error disappears
  auto& s = std::get<Split>(spec.contract.branches[0].body);
  s.arms[1].value = 200;
  CHECK(check_value_flow(spec).empty());
}

TEST_CASE("deadlines are sorted and deduplicated") {
  auto spec = two_party_spec();
  Contract inner{{Branch{{AfterGuard{500}}, Withdraw{"B"}}}};
  Split split;
  split.arms.push_back({300, std::make_shared<Contract>(inner)});
  spec.contract.branches = {
      Branch{{AfterGuard{900}}, Withdraw{"A"}},
      Branch{{AfterGuard{500}}, std::move(split)},
  };
  CHECK(spec.deadlines() == std::vector<Height>{500, 900});
}

TEST_CASE("resolve_branch follows nested paths") {
  auto spec = two_party_spec();
  Reveal r;
  r.secrets = {"a"};
  r.continuation = std::make_shared<Contract>(
      Contract{{Branch{{}, Withdraw{"A"}}, Branch{{}, Withdraw{"B"}}}});
  spec.contract.branches = {Branch{{}, std::move(r)},
                            Branch{{AfterGuard{10}}, Withdraw{"B"}}};

  const Branch* b = resolve_branch(spec.contract, {0, 1});
  REQUIRE(b != nullptr);
  CHECK(std::get<Withdraw>(b->body).recipient == "B");
  CHECK(resolve_branch(spec.contract, {0, 2}) == nullptr);
  CHECK(resolve_branch(spec.contract, {5}) == nullptr);
}

TEST_CASE("spec helpers") {
  auto spec = two_party_spec();
  CHECK(spec.total_deposit_value() == 300);
  CHECK(spec.total_fee_value() == 10);
  CHECK(spec.find_participant("B") != nullptr);
  CHECK(spec.find_participant("Z") == nullptr);
  CHECK(spec.find_secret("a") != nullptr);
  CHECK(spec.find_secret("q") == nullptr);
}
