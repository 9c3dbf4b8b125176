#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bitml {

// 1-based position inside a source file.
struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  std::string reason;
  std::string expected;  // hint, may be empty

  ParseError(int line_, int column_, std::string reason_, std::string expected_ = "")
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(column_) + ": " + reason_ +
                           (expected_.empty() ? "" : " (expected " + expected_ + ")")),
        line(line_),
        column(column_),
        reason(std::move(reason_)),
        expected(std::move(expected_)) {}
};

struct SExpr;

// Atoms keep their raw spelling so hex blobs with leading zeros survive.
struct SAtom {
  std::string text;
  bool is_int = false;
  bool is_string = false;  // was a quoted string literal
  int64_t value = 0;
};

struct SList {
  std::vector<SExpr> items;
};

struct SExpr {
  std::variant<SAtom, SList> node;
  int line = 0;
  int column = 0;

  bool is_list() const { return node.index() == 1; }
  const SList& list() const { return std::get<SList>(node); }
  const SAtom& atom() const { return std::get<SAtom>(node); }
};

// Reads all top-level forms. Throws ParseError; never crashes on
// arbitrary byte input.
std::vector<SExpr> read_sexprs(const std::string& text);

}  // namespace bitml
