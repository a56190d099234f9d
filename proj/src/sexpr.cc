#include "replab/sexpr.h"

#include <cctype>
#include <cstdlib>

namespace pddl {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view input) : input_(input) {}

  struct Token {
    enum class Kind { LParen, RParen, Atom, End };
    Kind kind;
    std::string text;
    SourcePos pos;
  };

  Token next() {
    skip_space();
    SourcePos pos{line_, col_};
    if (at_end()) return {Token::Kind::End, "", pos};
    char c = peek();
    if (c == '(') {
      advance();
      return {Token::Kind::LParen, "(", pos};
    }
    if (c == ')') {
      advance();
      return {Token::Kind::RParen, ")", pos};
    }
    std::string text;
    while (!at_end()) {
      char d = peek();
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
        break;
      text.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return {Token::Kind::Atom, text, pos};
  }

 private:
  bool at_end() const { return idx_ >= input_.size(); }
  char peek() const { return input_[idx_]; }

  void advance() {
    if (input_[idx_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++idx_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view input_;
  std::size_t idx_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') i = 1;
  if (i >= s.size()) return false;
  bool digit = false, dot = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digit = true;
    } else if (s[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digit;
}

Sexpr make_atom(Lexer::Token tok) {
  Sexpr node;
  node.pos = tok.pos;
  node.text = tok.text;
  if (looks_numeric(tok.text)) {
    node.kind = Sexpr::Kind::Number;
    node.number = std::strtod(tok.text.c_str(), nullptr);
  } else {
    node.kind = Sexpr::Kind::Symbol;
  }
  return node;
}

Sexpr parse_node(Lexer& lex, Lexer::Token tok) {
  switch (tok.kind) {
    case Lexer::Token::Kind::LParen: {
      Sexpr node;
      node.kind = Sexpr::Kind::List;
      node.pos = tok.pos;
      for (;;) {
        Lexer::Token t = lex.next();
        if (t.kind == Lexer::Token::Kind::RParen) return node;
        if (t.kind == Lexer::Token::Kind::End)
          throw ParseError("unterminated list", node.pos);
        node.items.push_back(parse_node(lex, t));
      }
    }
    case Lexer::Token::Kind::Atom:
      return make_atom(tok);
    case Lexer::Token::Kind::RParen:
      throw ParseError("unexpected ')'", tok.pos);
    case Lexer::Token::Kind::End:
      throw ParseError("unexpected end of input", tok.pos);
  }
  throw ParseError("unreachable", tok.pos);
}

}  // namespace

Sexpr parse_sexpr(std::string_view input) {
  Lexer lex(input);
  Lexer::Token tok = lex.next();
  if (tok.kind == Lexer::Token::Kind::End)
    throw ParseError("empty input", tok.pos);
  Sexpr node = parse_node(lex, tok);
  Lexer::Token rest = lex.next();
  if (rest.kind != Lexer::Token::Kind::End)
    throw ParseError("trailing content after expression", rest.pos);
  return node;
}

std::vector<Sexpr> parse_sexpr_list(std::string_view input) {
  Lexer lex(input);
  std::vector<Sexpr> nodes;
  for (;;) {
    Lexer::Token tok = lex.next();
    if (tok.kind == Lexer::Token::Kind::End) return nodes;
    nodes.push_back(parse_node(lex, tok));
  }
}

}  // namespace pddl
