#include "envcalc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace envcalc::oracle {

std::optional<double> central_fd(const sym::Expr& f, sym::VarId v, const sym::Valuation& p,
                                 double h) {
  sym::Valuation plus = p;
  sym::Valuation minus = p;
  const double x0 = p.binds(v) ? p.get(v) : 0.0;
  plus.set(v, x0 + h);
  minus.set(v, x0 - h);
  const double fp = sym::eval(f, plus);
  const double fm = sym::eval(f, minus);
  if (!std::isfinite(fp) || !std::isfinite(fm)) return std::nullopt;
  return (fp - fm) / (2.0 * h);
}

std::optional<double> directional_fd(const sym::Expr& f, std::span<const sym::Expr> direction,
                                     std::span<const sym::VarId> coords, const sym::Valuation& p,
                                     double h) {
  if (direction.size() != coords.size()) {
    throw std::invalid_argument("direction and coordinate lists differ in length");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const double w = sym::eval(direction[j], p);
    if (!std::isfinite(w)) return std::nullopt;
    if (w == 0.0) continue;
    const auto d = central_fd(f, coords[j], p, h);
    if (!d) return std::nullopt;
    sum += *d * w;
  }
  return sum;
}

std::size_t rank_at(std::vector<std::vector<double>> rows, std::optional<double> tol) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  double max_entry = 0.0;
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("rank_at: rows differ in length");
    for (double v : r) max_entry = std::max(max_entry, std::abs(v));
  }
  const double threshold = tol.value_or(1e-8 * max_entry);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[pivot][c])) pivot = r;
    }
    if (std::abs(rows[pivot][c]) <= threshold) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double factor = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

double fd_residual(double symbolic, double fd) {
  return std::abs(symbolic - fd) / (1.0 + std::abs(fd));
}

double fd_truncation(double at_h, double at_2h) {
  return std::abs(at_2h - at_h) / 3.0 / (1.0 + std::abs(at_h));
}

std::vector<double> eval_batch(const sym::Expr& e, std::span<const sym::Valuation> points,
                               Execution ex) {
  return map_indexed<double>(
      points.size(), [&](std::size_t i) { return sym::eval(e, points[i]); }, ex);
}

FdCheck fd_check_batch(const sym::Expr& f, const sym::Expr& df, sym::VarId v,
                       std::span<const sym::Valuation> points, double h, Execution ex) {
  const auto residuals = map_indexed<double>(
      points.size(),
      [&](std::size_t i) {
        const auto fd = central_fd(f, v, points[i], h);
        const double s = sym::eval(df, points[i]);
        if (!fd || !std::isfinite(s)) return -1.0;
        return fd_residual(s, *fd);
      },
      ex);
  FdCheck out;
  for (double r : residuals) {
    if (r < 0.0) continue;
    ++out.checked;
    out.worst = std::max(out.worst, r);
  }
  return out;
}

}  // namespace envcalc::oracle
