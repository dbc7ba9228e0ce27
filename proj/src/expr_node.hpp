#pragma once

#include <vector>

#include "envcalc/expr.hpp"

namespace envcalc::sym {

struct Node {
  Kind kind = Kind::Const;
  Rational value;
  VarId var;
  int exponent = 0;
  std::vector<Expr> children;
  std::vector<VarId> vars;
  std::uint64_t hash = 0;
  bool canonical = false;
};

struct Builder {
  static Expr make(Node n);
  static Expr constant(const Rational& r, bool canonical);
  static Expr node(Kind k, std::vector<Expr> children, int exponent = 0, bool canonical = false);
};

}  // namespace envcalc::sym
