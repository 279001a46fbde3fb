#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace planguard {

// Parse error with a 1-based source position.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, std::size_t line, std::size_t column)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// One node of an s-expression tree. Lists keep the byte span of their
// interior so callers can recover raw text (used for constraint sentences).
struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> children;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t interior_begin = 0;  // byte offset just after '('
  std::size_t interior_end = 0;    // byte offset of the matching ')'

  bool tagged(std::string_view tag) const {
    return !is_atom && !children.empty() && children.front().is_atom &&
           children.front().atom == tag;
  }
};

// Parses one s-expression from `text` (';' comments run to end of line).
// Throws SyntaxError on malformed input or trailing garbage.
SExpr parse_sexpr(std::string_view text);

// Interior source text of a list node, whitespace-normalized to single
// spaces. Used to keep natural-language constraint sentences verbatim.
std::string raw_interior(std::string_view source, const SExpr& node);

}  // namespace planguard
