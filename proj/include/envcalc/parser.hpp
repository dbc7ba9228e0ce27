#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "envcalc/expr.hpp"

namespace envcalc::cli {

/// Syntax or scoping error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }
  [[nodiscard]] const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::size_t line_;
  std::size_t column_;
};

/// Which variables an expression may mention. A max index of 0 means
/// unbounded.
struct VariableContext {
  std::array<bool, 3> allowed{true, true, true};
  std::array<std::uint32_t, 3> max_index{0, 0, 0};

  static VariableContext any() { return {}; }
  static VariableContext product(std::uint32_t m, std::uint32_t n) {
    return {{true, true, false}, {m, n, 0}};
  }
  static VariableContext outer() { return {{false, false, true}, {0, 0, 0}}; }
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' ['-'] integer)?
///   base   := number | ident | func '(' expr ')' | '(' expr ')'
///   func   := exp | sin | cos | log;  ident := [xyt][0-9]+
/// A quotient of two numeric literals folds into one rational constant.
[[nodiscard]] sym::Expr parse_expr(std::string_view text,
                                   const VariableContext& ctx = VariableContext::any(),
                                   std::size_t line_offset = 0, std::size_t column_offset = 0);

}  // namespace envcalc::cli
