#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pddl {

struct SourcePos {
  int line = 0;
  int col = 0;
};

// Lexical or structural error in an input stream, with position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, SourcePos pos)
      : std::runtime_error(msg + " (line " + std::to_string(pos.line) +
                           ", col " + std::to_string(pos.col) + ")"),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

// Well-formed input that violates the semantics of the PDDL fragment
// (unknown type, arity mismatch, duplicate name, ...).
class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
  SemanticError(const std::string& msg, SourcePos pos)
      : std::runtime_error(msg + " (line " + std::to_string(pos.line) +
                           ", col " + std::to_string(pos.col) + ")") {}
};

// One node of a parsed s-expression. Symbols are lower-cased on read
// (PDDL identifiers are case-insensitive; canonical form is lower-case).
struct Sexpr {
  enum class Kind { List, Symbol, Number };

  Kind kind = Kind::List;
  std::string text;           // symbol text or literal number text
  double number = 0.0;        // valid when kind == Number
  std::vector<Sexpr> items;   // valid when kind == List
  SourcePos pos;

  bool is_list() const { return kind == Kind::List; }
  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view s) const {
    return kind == Kind::Symbol && text == s;
  }
  bool is_number() const { return kind == Kind::Number; }

  // Head symbol of a list, or "" if not a non-empty list with a symbol head.
  std::string_view head() const {
    if (!is_list() || items.empty() || !items[0].is_symbol()) return {};
    return items[0].text;
  }
};

// Parses exactly one s-expression; trailing whitespace/comments allowed.
Sexpr parse_sexpr(std::string_view input);

// Parses a sequence of top-level s-expressions (e.g. one plan step per line).
std::vector<Sexpr> parse_sexpr_list(std::string_view input);

}  // namespace pddl
