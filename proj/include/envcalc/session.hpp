#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "envcalc/algebra.hpp"
#include "envcalc/calculus.hpp"
#include "envcalc/equality.hpp"
#include "envcalc/parser.hpp"

namespace envcalc::cli {

/// Declarations read from session text, one per line:
///   f := expr                  function on M x N
///   g := H @ [a1, ..., ak]     explicit pair, H in t1..tk, a_i separable
///   X := [v1, ..., v(m+n)]     derivation values on x1..xm, y1..yn
///   # comment
/// A plain expression becomes embed(a) when it is separable, otherwise the
/// pair (H, coordinates) with H the expression renamed into t variables.
class Session {
 public:
  explicit Session(ProductModel model) : model_(model) {}

  [[nodiscard]] const ProductModel& model() const { return model_; }
  sym::OracleConfig oracle;

  /// Throws ParseError, with positions counted from `line_no` (1-based).
  void declare(std::string_view line, std::size_t line_no = 1);
  void load(std::string_view text);

  /// Throws std::out_of_range naming the missing declaration.
  [[nodiscard]] const EnvelopeElement& function(const std::string& name) const;
  [[nodiscard]] const DerivationEnv& derivation(const std::string& name) const;

  [[nodiscard]] std::vector<std::string> function_names() const;
  [[nodiscard]] std::vector<std::string> derivation_names() const;

  /// The element a plain expression on M x N stands for.
  [[nodiscard]] EnvelopeElement lift(const sym::Expr& e) const;

 private:
  ProductModel model_;
  std::map<std::string, EnvelopeElement> functions_;
  std::map<std::string, DerivationEnv> derivations_;
};

}  // namespace envcalc::cli
