#include "envcalc/eval.hpp"

#include <cmath>
#include <limits>

namespace envcalc::sym {

Valuation Valuation::from_rationals(const std::map<VarId, Rational>& p) {
  Valuation v;
  for (const auto& [var, value] : p) v.set(var, value.to_double());
  return v;
}

void Valuation::set(VarId v, double value) {
  auto& g = values_[static_cast<int>(v.group)];
  if (g.size() < v.index) g.resize(v.index, std::numeric_limits<double>::quiet_NaN());
  g[v.index - 1] = value;
}

bool Valuation::binds(VarId v) const {
  const auto& g = values_[static_cast<int>(v.group)];
  return v.index >= 1 && v.index <= g.size() && !std::isnan(g[v.index - 1]);
}

double Valuation::get(VarId v) const {
  if (!binds(v)) throw UnboundVariable(v);
  return values_[static_cast<int>(v.group)][v.index - 1];
}

double eval(const Expr& e, const Valuation& p) {
  switch (e.kind()) {
    case Kind::Const:
      return e.value().to_double();
    case Kind::Var:
      return p.get(e.var());
    case Kind::Add: {
      double s = 0.0;
      for (const auto& c : e.children()) s += eval(c, p);
      return s;
    }
    case Kind::Mul: {
      double s = 1.0;
      for (const auto& c : e.children()) s *= eval(c, p);
      return s;
    }
    case Kind::Pow: {
      const double b = eval(e.children()[0], p);
      if (b == 0.0 && e.exponent() < 0) return std::numeric_limits<double>::infinity();
      return std::pow(b, e.exponent());
    }
    case Kind::Exp:
      return std::exp(eval(e.arg(), p));
    case Kind::Log: {
      const double a = eval(e.arg(), p);
      if (!(a > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      return std::log(a);
    }
    case Kind::Sin:
      return std::sin(eval(e.arg(), p));
    case Kind::Cos:
      return std::cos(eval(e.arg(), p));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval(const Expr& e, const std::map<VarId, Rational>& p) {
  return eval(e, Valuation::from_rationals(p));
}

}  // namespace envcalc::sym
