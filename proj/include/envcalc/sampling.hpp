#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "envcalc/eval.hpp"
#include "envcalc/expr.hpp"
#include "envcalc/rational.hpp"

namespace envcalc::oracle {

/// SplitMix64. Integer-only so sequences are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  bool chance(std::uint32_t percent) { return below(100) < percent; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a parent seed and a label.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

struct Interval {
  Rational lo{-1};
  Rational hi{1};
};

/// Sampling box: one interval per variable, with a default for the rest.
struct Box {
  Interval fallback{Rational(-1), Rational(1)};
  std::map<sym::VarId, Interval> overrides;

  [[nodiscard]] const Interval& at(sym::VarId v) const;
};

/// Seeded stream of rational sample points (denominators divide 2^16 times
/// the interval denominators) over a fixed list of variables.
class SampleStream {
 public:
  static constexpr std::int64_t kResolution = 1 << 16;

  SampleStream(std::uint64_t seed, Box box, std::vector<sym::VarId> vars);

  /// Next point as exact rationals.
  std::map<sym::VarId, Rational> next_exact();
  /// Next point as a valuation.
  sym::Valuation next();

  [[nodiscard]] const std::vector<sym::VarId>& vars() const { return vars_; }

 private:
  SplitMix64 rng_;
  Box box_;
  std::vector<sym::VarId> vars_;
};

/// Union of the variables of several expressions, sorted.
[[nodiscard]] std::vector<sym::VarId> collect_vars(std::span<const sym::Expr> exprs);

}  // namespace envcalc::oracle
