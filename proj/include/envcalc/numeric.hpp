#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "envcalc/eval.hpp"
#include "envcalc/expr.hpp"
#include "envcalc/parallel.hpp"

namespace envcalc::oracle {

inline constexpr double kDefaultStep = 1e-4;

/// (f(p + h e_v) - f(p - h e_v)) / 2h. Empty when either evaluation is
/// non-finite, which callers treat as a request to resample.
[[nodiscard]] std::optional<double> central_fd(const sym::Expr& f, sym::VarId v,
                                               const sym::Valuation& p, double h = kDefaultStep);

/// sum_j central_fd(f, coords[j]) * direction[j](p).
[[nodiscard]] std::optional<double> directional_fd(const sym::Expr& f,
                                                   std::span<const sym::Expr> direction,
                                                   std::span<const sym::VarId> coords,
                                                   const sym::Valuation& p, double h = kDefaultStep);

/// Numerical rank by Gaussian elimination with partial pivoting. Pivots at
/// or below `tol` count as zero; the default is 1e-8 times the largest entry.
[[nodiscard]] std::size_t rank_at(std::vector<std::vector<double>> rows,
                                  std::optional<double> tol = std::nullopt);

/// Relative residual |sym - fd| / (1 + |fd|).
[[nodiscard]] double fd_residual(double symbolic, double fd);

/// Truncation error of a central difference at step h, estimated from the
/// same difference at 2h as |at_2h - at_h| / 3 and scaled like fd_residual.
[[nodiscard]] double fd_truncation(double at_h, double at_2h);

// --- batch kernels ---------------------------------------------------------
// Each kernel has a serial reference path and an OpenMP path; both produce
// identical results because per-point work is independent and reductions
// are order-free (max) or index-ordered.

[[nodiscard]] std::vector<double> eval_batch(const sym::Expr& e,
                                             std::span<const sym::Valuation> points,
                                             Execution ex = Execution::Parallel);

struct FdCheck {
  double worst = 0.0;        // largest relative residual
  std::size_t checked = 0;   // points where both sides were finite
};

/// Compares a symbolic derivative `df` of `f` along `v` against central
/// differences at every point.
[[nodiscard]] FdCheck fd_check_batch(const sym::Expr& f, const sym::Expr& df, sym::VarId v,
                                     std::span<const sym::Valuation> points,
                                     double h = kDefaultStep, Execution ex = Execution::Parallel);

}  // namespace envcalc::oracle
