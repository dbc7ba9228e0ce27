#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "envcalc/equality.hpp"
#include "envcalc/eval.hpp"
#include "envcalc/expr.hpp"

namespace envcalc {

/// Coordinate model of M x N with M = R^m, N = R^n.
class ProductModel {
 public:
  ProductModel(std::uint32_t m, std::uint32_t n);

  [[nodiscard]] std::uint32_t m() const { return m_; }
  [[nodiscard]] std::uint32_t n() const { return n_; }
  [[nodiscard]] std::uint32_t dimension() const { return m_ + n_; }
  /// x1..xm, y1..yn in basis order.
  [[nodiscard]] std::vector<sym::VarId> coordinates() const;
  [[nodiscard]] sym::VarId coordinate(std::size_t i) const;

  friend bool operator==(const ProductModel&, const ProductModel&) = default;

 private:
  std::uint32_t m_;
  std::uint32_t n_;
};

/// Thrown when an expression uses variables outside the block it belongs to.
class GroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Element of A = C(M) (x) C(N): a finite sum of separable products f(x) g(y).
class AElement {
 public:
  struct Term {
    sym::Expr f;  // X variables only
    sym::Expr g;  // Y variables only
  };

  AElement() = default;
  explicit AElement(std::vector<Term> terms);

  static AElement constant(const Rational& r);
  static AElement from_x(const sym::Expr& f);
  static AElement from_y(const sym::Expr& g);
  static AElement product(const sym::Expr& f, const sym::Expr& g);
  /// Splits a normalized expression into separable terms; empty when some
  /// monomial mixes x and y inside a kernel or an inverted sum.
  static std::optional<AElement> try_from_expr(const sym::Expr& e);

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  /// Normalized sum of f*g.
  [[nodiscard]] const sym::Expr& flatten() const { return flat_; }
  [[nodiscard]] bool is_zero() const { return flat_.is_zero(); }
  [[nodiscard]] AElement partial(sym::VarId v) const;
  [[nodiscard]] double evaluate(const sym::Valuation& p) const { return sym::eval(flat_, p); }

  friend AElement operator+(const AElement& a, const AElement& b);
  friend AElement operator-(const AElement& a, const AElement& b);
  friend AElement operator*(const AElement& a, const AElement& b);
  friend AElement operator*(const Rational& r, const AElement& a);
  friend AElement operator-(const AElement& a);
  /// Structural equality of the term lists.
  friend bool operator==(const AElement& a, const AElement& b);

 private:
  std::vector<Term> terms_;
  sym::Expr flat_;
};

std::ostream& operator<<(std::ostream& os, const AElement& a);

/// Element H o a of the smooth envelope, kept as the structural pair
/// (H, a). H is an expression in t1..tk and a = (a1..ak) lies in A^k.
/// The flat (H with ti replaced by ai) is computed at construction.
class EnvelopeElement {
 public:
  EnvelopeElement();  // zero
  EnvelopeElement(sym::Expr outer, std::vector<AElement> args);

  static EnvelopeElement constant(const Rational& r);

  [[nodiscard]] const sym::Expr& outer() const { return outer_; }
  [[nodiscard]] const std::vector<AElement>& args() const { return args_; }
  [[nodiscard]] std::size_t arity() const { return args_.size(); }
  [[nodiscard]] const sym::Expr& flat() const { return flat_; }
  [[nodiscard]] double evaluate(const sym::Valuation& p) const { return sym::eval(flat_, p); }

  /// Structural equality of the pair; use same_function for flat equality.
  friend bool operator==(const EnvelopeElement& a, const EnvelopeElement& b);

 private:
  sym::Expr outer_;
  std::vector<AElement> args_;
  sym::Expr flat_;
};

std::ostream& operator<<(std::ostream& os, const EnvelopeElement& e);

/// (rH) o a
[[nodiscard]] EnvelopeElement env_scalar_mul(const Rational& r, const EnvelopeElement& e);
/// (H + H') o (a (+) a'), with H' shifted to t_{k+1}..t_{k+k'}.
[[nodiscard]] EnvelopeElement env_add(const EnvelopeElement& e, const EnvelopeElement& f);
/// (H * H') o (a (+) a'), same shift.
[[nodiscard]] EnvelopeElement env_mul(const EnvelopeElement& e, const EnvelopeElement& f);
[[nodiscard]] EnvelopeElement env_neg(const EnvelopeElement& e);
[[nodiscard]] EnvelopeElement env_sub(const EnvelopeElement& e, const EnvelopeElement& f);
/// The inclusion of A into its envelope: a -> (t1, (a)).
[[nodiscard]] EnvelopeElement embed_A(const AElement& a);
/// Substitutes the arguments into H and normalizes.
[[nodiscard]] sym::Expr flatten(const EnvelopeElement& e);

/// Flat equality through the oracle.
[[nodiscard]] sym::EqualityResult same_function(const EnvelopeElement& a, const EnvelopeElement& b,
                                                const sym::OracleConfig& cfg);

/// Sum of several envelope elements (zero for an empty list).
[[nodiscard]] EnvelopeElement env_sum(const std::vector<EnvelopeElement>& terms);

// X <-> Y swap, used to mirror constructions between the two factors.
[[nodiscard]] sym::VarId mirror(sym::VarId v);
[[nodiscard]] sym::Expr mirror(const sym::Expr& e);
[[nodiscard]] AElement mirror(const AElement& a);
[[nodiscard]] EnvelopeElement mirror(const EnvelopeElement& e);

}  // namespace envcalc
