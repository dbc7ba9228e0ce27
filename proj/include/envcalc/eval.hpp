#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "envcalc/expr.hpp"

namespace envcalc::sym {

/// Raised when an expression mentions a variable the valuation does not bind.
class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(VarId v)
      : std::runtime_error("unbound variable " + v.name()), var_(v) {}
  [[nodiscard]] VarId var() const { return var_; }

 private:
  VarId var_;
};

/// Assignment of real values to variables, stored per coordinate group.
class Valuation {
 public:
  Valuation() = default;
  Valuation(std::vector<double> xs, std::vector<double> ys, std::vector<double> ts = {})
      : values_{std::move(xs), std::move(ys), std::move(ts)} {}
  static Valuation from_rationals(const std::map<VarId, Rational>& p);

  void set(VarId v, double value);
  [[nodiscard]] double get(VarId v) const;
  [[nodiscard]] bool binds(VarId v) const;
  [[nodiscard]] const std::vector<double>& group(Group g) const {
    return values_[static_cast<int>(g)];
  }

 private:
  std::vector<double> values_[3];
};

/// Floating evaluation. Domain violations (log of a non-positive number,
/// division by zero) yield a non-finite value rather than an exception.
[[nodiscard]] double eval(const Expr& e, const Valuation& p);
[[nodiscard]] double eval(const Expr& e, const std::map<VarId, Rational>& p);

}  // namespace envcalc::sym
