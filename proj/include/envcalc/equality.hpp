#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "envcalc/expr.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc::sym {

struct OracleConfig {
  std::uint64_t seed = 42;
  std::size_t samples = 64;
  /// Points separate two expressions when |a - b| > tolerance * (1 + max(|a|, |b|)).
  double tolerance = 1e-9;
  oracle::Box domain;
  /// Extra draws allowed per sample when an expression is non-finite there.
  std::size_t max_retries = 100;

  void validate() const;
};

enum class Verdict { Equal, NotEqual, Undetermined };

[[nodiscard]] const char* to_string(Verdict v);

struct EqualityResult {
  Verdict verdict = Verdict::Equal;
  /// True when the verdict came from coinciding normal forms.
  bool symbolic = false;
  /// Number of finite sample points compared.
  std::size_t samples = 0;
  /// Largest scaled difference seen while sampling.
  double residual = 0.0;

  [[nodiscard]] bool holds() const { return verdict != Verdict::NotEqual; }
};

/// Three-valued equality: Equal when normal forms (or the normal form of the
/// difference) coincide, NotEqual when a seeded sample separates the two,
/// Undetermined otherwise.
[[nodiscard]] EqualityResult equal(const Expr& a, const Expr& b, const OracleConfig& cfg);

/// Combines coefficientwise results: any NotEqual wins, then Undetermined.
[[nodiscard]] EqualityResult combine(std::span<const EqualityResult> parts);

/// Largest scaled difference over `cfg.samples` finite sample points,
/// independent of normal forms.
[[nodiscard]] double sampled_residual(const Expr& a, const Expr& b, const OracleConfig& cfg);

}  // namespace envcalc::sym
