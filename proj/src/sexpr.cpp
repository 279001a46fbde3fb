#include "planguard/sexpr.hpp"

#include <cctype>

namespace planguard {
namespace {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++pos;
  }

  void skip_blanks() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_blanks();
    return pos >= text.size();
  }
};

SExpr parse_node(Lexer& lex) {
  lex.skip_blanks();
  if (lex.pos >= lex.text.size())
    throw SyntaxError("unexpected end of input", lex.line, lex.column);

  SExpr node;
  node.line = lex.line;
  node.column = lex.column;

  char c = lex.text[lex.pos];
  if (c == ')') throw SyntaxError("unexpected ')'", lex.line, lex.column);

  if (c == '(') {
    lex.advance();
    node.interior_begin = lex.pos;
    while (true) {
      lex.skip_blanks();
      if (lex.pos >= lex.text.size())
        throw SyntaxError("unclosed '('", node.line, node.column);
      if (lex.text[lex.pos] == ')') {
        node.interior_end = lex.pos;
        lex.advance();
        return node;
      }
      node.children.push_back(parse_node(lex));
    }
  }

  // Atom: any run of characters that cannot start or end a list.
  node.is_atom = true;
  std::size_t start = lex.pos;
  while (lex.pos < lex.text.size()) {
    char a = lex.text[lex.pos];
    if (a == '(' || a == ')' || a == ';' ||
        std::isspace(static_cast<unsigned char>(a)))
      break;
    lex.advance();
  }
  node.atom = std::string(lex.text.substr(start, lex.pos - start));
  return node;
}

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Lexer lex{text};
  SExpr root = parse_node(lex);
  if (!lex.eof())
    throw SyntaxError("trailing input after expression", lex.line, lex.column);
  return root;
}

std::string raw_interior(std::string_view source, const SExpr& node) {
  std::string out;
  bool in_space = true;
  for (std::size_t i = node.interior_begin; i < node.interior_end; ++i) {
    char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace planguard
