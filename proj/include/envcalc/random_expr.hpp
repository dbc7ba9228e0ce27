#pragma once

#include <vector>

#include "envcalc/expr.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc::gen {

/// Polynomial expressions use only rationals, +, -, * and non-negative
/// integer powers; transcendental ones add exp/sin/cos/log and quotients.
enum class Tier { Polynomial, Transcendental };

[[nodiscard]] const char* to_string(Tier t);

/// Seeded generator of well-conditioned random expressions. Quotients and
/// logarithms only appear as 1/(1 + s^2), 1/(2 + cos s) and log(1 + s^2),
/// so generated functions are smooth on the whole sampling box.
class ExprGenerator {
 public:
  ExprGenerator(oracle::SplitMix64& rng, std::vector<sym::VarId> vars, Tier tier)
      : rng_(rng), vars_(std::move(vars)), tier_(tier) {}

  [[nodiscard]] sym::Expr operator()(int depth);
  [[nodiscard]] sym::Expr leaf();
  [[nodiscard]] Rational small_rational();

 private:
  oracle::SplitMix64& rng_;
  std::vector<sym::VarId> vars_;
  Tier tier_;
};

}  // namespace envcalc::gen
