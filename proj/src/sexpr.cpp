#include "bitml/sexpr.hpp"

#include <cctype>

namespace bitml {

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  explicit Reader(const std::string& t) : text(t) {}

  bool eof() const { return pos >= text.size(); }

  char peek() const { return text[pos]; }

  char advance() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {  // comment to end of line
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
           c != ')' && c != '"' && c != ';';
  }

  SExpr read_atom() {
    SExpr e;
    e.line = line;
    e.column = column;
    std::string s;
    while (!eof() && atom_char(peek())) s.push_back(advance());
    SAtom a;
    a.text = s;
    bool digits = !s.empty();
    size_t start = (s[0] == '-' && s.size() > 1) ? 1 : 0;
    if (start == s.size()) digits = false;
    for (size_t i = start; i < s.size() && digits; ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
    if (digits) {
      a.is_int = true;
      try {
        a.value = std::stoll(s);
      } catch (const std::exception&) {
        a.is_int = false;  // oversized digit runs are hex blobs, keep as symbol
      }
    }
    e.node = a;
    return e;
  }

  SExpr read_string() {
    SExpr e;
    e.line = line;
    e.column = column;
    advance();  // opening quote
    std::string s;
    while (true) {
      if (eof()) throw ParseError(e.line, e.column, "unterminated string", "\"");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) throw ParseError(line, column, "unterminated escape");
        s.push_back(advance());
      } else {
        s.push_back(c);
      }
    }
    SAtom a;
    a.text = s;
    a.is_string = true;
    e.node = a;
    return e;
  }

  SExpr read_form() {
    skip_ws();
    if (eof()) throw ParseError(line, column, "unexpected end of input", "form");
    char c = peek();
    if (c == '(') {
      SExpr e;
      e.line = line;
      e.column = column;
      advance();
      SList l;
      while (true) {
        skip_ws();
        if (eof())
          throw ParseError(e.line, e.column, "unclosed parenthesis", ")");
        if (peek() == ')') {
          advance();
          break;
        }
        l.items.push_back(read_form());
      }
      e.node = std::move(l);
      return e;
    }
    if (c == ')') throw ParseError(line, column, "unexpected ')'");
    if (c == '"') return read_string();
    return read_atom();
  }
};

}  // namespace

std::vector<SExpr> read_sexprs(const std::string& text) {
  Reader r(text);
  std::vector<SExpr> forms;
  while (true) {
    r.skip_ws();
    if (r.eof()) break;
    forms.push_back(r.read_form());
  }
  return forms;
}

}  // namespace bitml
