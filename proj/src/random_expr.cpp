#include "envcalc/random_expr.hpp"

namespace envcalc::gen {

const char* to_string(Tier t) { return t == Tier::Polynomial ? "polynomial" : "transcendental"; }

Rational ExprGenerator::small_rational() {
  const long num = static_cast<long>(rng_.between(-3, 3));
  const long den = rng_.chance(25) ? 2 : 1;
  return Rational(num == 0 ? 1 : num, den);
}

sym::Expr ExprGenerator::leaf() {
  if (vars_.empty() || rng_.chance(25)) return sym::Expr(small_rational());
  return sym::variable(vars_[rng_.below(vars_.size())]);
}

sym::Expr ExprGenerator::operator()(int depth) {
  if (depth <= 0) return leaf();
  const std::uint64_t ops = tier_ == Tier::Polynomial ? 5 : 11;
  // Operands are drawn into locals so the draw order is fixed.
  const std::uint64_t op = rng_.below(ops);
  if (op == 4) return leaf();
  const sym::Expr a = (*this)(depth - 1);
  switch (op) {
    case 0: {
      const sym::Expr b = (*this)(depth - 1);
      return a + b;
    }
    case 1: {
      const sym::Expr b = (*this)(depth - 1);
      return a * b;
    }
    case 2: {
      const sym::Expr c(small_rational());
      const sym::Expr b = (*this)(depth - 1);
      return a - c * b;
    }
    case 3:
      return sym::pow(a, static_cast<int>(rng_.between(2, 3)));
    case 5:
      return sym::exp(sym::Expr(Rational(1, 2)) * a);
    case 6:
      return sym::sin(a);
    case 7:
      return sym::cos(a);
    case 8:
      return sym::log(sym::Expr(1) + sym::pow(a, 2));
    case 9: {
      const sym::Expr b = (*this)(depth - 1);
      return a / (sym::Expr(1) + sym::pow(b, 2));
    }
    default: {
      const sym::Expr b = (*this)(depth - 1);
      return a / (sym::Expr(2) + sym::cos(b));
    }
  }
}

}  // namespace envcalc::gen
