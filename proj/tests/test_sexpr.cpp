#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <string>

#include "bitml/sexpr.hpp"
#include "doctest.h"

using namespace bitml;

TEST_CASE("atoms, integers and strings") {
  auto forms = read_sexprs("foo 42 -7 \"bar baz\"");
  REQUIRE(forms.size() == 4);
  CHECK(forms[0].atom().text == "foo");
  CHECK_FALSE(forms[0].atom().is_int);
  CHECK(forms[1].atom().is_int);
  CHECK(forms[1].atom().value == 42);
  CHECK(forms[2].atom().value == -7);
  CHECK(forms[3].atom().is_string);
  CHECK(forms[3].atom().text == "bar baz");
}

TEST_CASE("nesting and positions") {
  auto forms = read_sexprs("(a (b c)\n  (d))");
  REQUIRE(forms.size() == 1);
  const auto& l = forms[0].list();
  REQUIRE(l.items.size() == 3);
  CHECK(l.items[1].is_list());
  CHECK(l.items[2].line == 2);
  CHECK(l.items[2].column == 3);
}

TEST_CASE("comments run to end of line") {
  auto forms = read_sexprs("; leading\n(a) ; trailing (ignored\n(b)");
  REQUIRE(forms.size() == 2);
  CHECK(forms[0].list().items[0].atom().text == "a");
  CHECK(forms[1].list().items[0].atom().text == "b");
}

TEST_CASE("string escapes pass the next character through") {
  auto forms = read_sexprs(R"("a\"b" "\\/" "\\\\")");
  REQUIRE(forms.size() == 3);
  CHECK(forms[0].atom().text == "a\"b");
  CHECK(forms[1].atom().text == "\\/");
  CHECK(forms[2].atom().text == "\\\\");
}

TEST_CASE("oversized digit runs stay symbols") {
  // 64-digit decimal txids must not be rejected as out-of-range integers
  std::string txid(64, '1');
  auto forms = read_sexprs(txid);
  REQUIRE(forms.size() == 1);
  CHECK_FALSE(forms[0].atom().is_int);
  CHECK(forms[0].atom().text == txid);
}

TEST_CASE("parse errors carry positions") {
  try {
    read_sexprs("(a\n  (b");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line >= 1);
    CHECK(e.column >= 1);
  }
  CHECK_THROWS_AS(read_sexprs(")"), ParseError);
  CHECK_THROWS_AS(read_sexprs("\"unterminated"), ParseError);
}

TEST_CASE("arbitrary bytes never crash the reader") {
  std::mt19937 rng(20260823);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> byte(0, 255);
  // biased toward structural characters to reach deep paths
  const std::string structural = "()\";\\ \n\t0123456789abc-";
  std::uniform_int_distribution<size_t> pick(0, structural.size() - 1);
  std::bernoulli_distribution useStructural(0.7);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i)
      s.push_back(useStructural(rng) ? structural[pick(rng)]
                                     : char(byte(rng)));
    try {
      read_sexprs(s);
    } catch (const ParseError&) {
      // rejection is fine; crashing is not
    }
  }
}
