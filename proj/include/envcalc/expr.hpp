#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "envcalc/rational.hpp"

namespace envcalc::sym {

/// Coordinate block a variable belongs to: x on M, y on N, t on R^k.
enum class Group : std::uint8_t { X = 0, Y = 1, T = 2 };

struct VarId {
  Group group = Group::X;
  std::uint32_t index = 1;  // 1-based

  [[nodiscard]] std::string name() const;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

[[nodiscard]] inline VarId x(std::uint32_t i) { return {Group::X, i}; }
[[nodiscard]] inline VarId y(std::uint32_t i) { return {Group::Y, i}; }
[[nodiscard]] inline VarId t(std::uint32_t i) { return {Group::T, i}; }

/// Node kinds. The enumerator order is the structural sort order.
enum class Kind : std::uint8_t { Const, Var, Exp, Log, Sin, Cos, Pow, Mul, Add };

[[nodiscard]] bool is_function(Kind k);
[[nodiscard]] const char* function_name(Kind k);

struct Node;

/// Immutable handle to a smooth expression tree. Copies share structure.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)
  Expr(long value) : Expr(Rational(value)) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] const Rational& value() const;
  [[nodiscard]] VarId var() const;
  [[nodiscard]] int exponent() const;
  [[nodiscard]] std::span<const Expr> children() const;
  [[nodiscard]] const Expr& arg() const { return children()[0]; }
  /// Sorted, duplicate-free list of variables occurring in the tree.
  [[nodiscard]] std::span<const VarId> vars() const;
  [[nodiscard]] std::uint64_t hash() const;
  /// True for trees produced by normalize().
  [[nodiscard]] bool is_canonical() const;

  [[nodiscard]] bool is_const() const { return kind() == Kind::Const; }
  [[nodiscard]] bool is_zero() const { return is_const() && value().is_zero(); }
  [[nodiscard]] bool is_one() const { return is_const() && value().is_one(); }
  [[nodiscard]] bool depends_on(VarId v) const;
  [[nodiscard]] bool only_group(Group g) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering compare(const Expr& a, const Expr& b);

 private:
  friend struct Builder;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Raw builders. They flatten nested sums/products and drop neutral elements
// but otherwise keep the tree as written; normalize() gives canonical forms.
[[nodiscard]] Expr variable(VarId v);
[[nodiscard]] Expr add(std::vector<Expr> terms);
[[nodiscard]] Expr mul(std::vector<Expr> factors);
[[nodiscard]] Expr pow(const Expr& base, int exponent);
[[nodiscard]] Expr neg(const Expr& e);
[[nodiscard]] Expr exp(const Expr& e);
[[nodiscard]] Expr log(const Expr& e);
[[nodiscard]] Expr sin(const Expr& e);
[[nodiscard]] Expr cos(const Expr& e);
[[nodiscard]] Expr apply_function(Kind k, const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Text form accepted by the parser; parse(print(parse(s))) == parse(s).
[[nodiscard]] std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// --- symbolic operations -------------------------------------------------

/// Canonical form: expanded sum of monomials over atoms (variables,
/// exp/sin/cos/log kernels of normalized arguments, inverses of sums),
/// ordered graded-lexicographically. Idempotent.
[[nodiscard]] Expr normalize(const Expr& e);

/// Exact partial derivative, normalized.
[[nodiscard]] Expr partial(const Expr& e, VarId v);

/// Replaces variables for which `f` returns a value. Result is raw.
[[nodiscard]] Expr substitute(const Expr& e,
                              const std::function<std::optional<Expr>(VarId)>& f);

/// Maps every variable through `f` (used for t-index shifts and X<->Y swaps).
[[nodiscard]] Expr rename(const Expr& e, const std::function<VarId(VarId)>& f);

/// Highest t-index occurring in `e` (0 if none).
[[nodiscard]] std::uint32_t max_t_index(const Expr& e);

/// Sign of the leading coefficient of a normalized expression (+1 for atoms).
[[nodiscard]] int leading_sign(const Expr& canonical);

/// True if `e` is built only from rationals, variables, +, *, and
/// non-negative integer powers.
[[nodiscard]] bool is_polynomial(const Expr& e);

}  // namespace envcalc::sym

template <>
struct std::hash<envcalc::sym::Expr> {
  std::size_t operator()(const envcalc::sym::Expr& e) const noexcept {
    return static_cast<std::size_t>(e.hash());
  }
};
