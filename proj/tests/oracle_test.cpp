#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "envcalc/numeric.hpp"
#include "envcalc/parser.hpp"
#include "envcalc/random_expr.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc::oracle {
namespace {

using sym::Expr;
using sym::Valuation;

Expr P(std::string_view s) { return cli::parse_expr(s); }

const std::vector<sym::VarId> kCoords{sym::x(1), sym::x(2), sym::y(1), sym::y(2)};

TEST(CentralFd, Examples) {
  EXPECT_NEAR(*central_fd(P("x1^2"), sym::x(1), Valuation({1, 0.3}, {0.2, -0.5})), 2.0, 1e-7);
  EXPECT_NEAR(*central_fd(P("7/3"), sym::y(2), Valuation({1, 0.3}, {0.2, -0.5})), 0.0, 1e-9);
  EXPECT_NEAR(*central_fd(P("exp(x1*y1)"), sym::x(1), Valuation({1, 0}, {1, 0})), std::numbers::e, 1e-5);
}

TEST(CentralFd, NonFiniteAsksForResample) {
  EXPECT_FALSE(central_fd(P("log(x1)"), sym::x(1), Valuation({0, 0}, {0, 0})).has_value());
  EXPECT_FALSE(central_fd(P("1/x1"), sym::x(2), Valuation({0, 0}, {0, 0})).has_value());
}

TEST(CentralFd, TruncationEstimate) {
  // For x1^3 the central difference at step h is exactly 3*x1^2 + h^2.
  const Valuation p({1, 0}, {0, 0});
  const double h = kDefaultStep;
  const double at_h = *central_fd(P("x1^3"), sym::x(1), p, h);
  const double at_2h = *central_fd(P("x1^3"), sym::x(1), p, 2 * h);
  EXPECT_NEAR(fd_truncation(at_h, at_2h), h * h / 4, 1e-10);
  EXPECT_EQ(fd_truncation(2.0, 2.0), 0.0);

  // A fast oscillation is not resolved at the default step.
  const Expr fast = P("sin(exp(3 - 3*y1))");
  const Valuation q({0, 0}, {-0.9, 0});
  const double f_h = *central_fd(fast, sym::y(1), q, h);
  const double f_2h = *central_fd(fast, sym::y(1), q, 2 * h);
  EXPECT_GT(fd_truncation(f_h, f_2h), 1e-5);
}

TEST(DirectionalFd, Examples) {
  const Valuation p({1, 0}, {2, 0});
  const std::vector<Expr> ex{Expr(1), Expr(0), Expr(0), Expr(0)};
  EXPECT_NEAR(*directional_fd(P("x1"), ex, kCoords, p), 1.0, 1e-9);

  // (y1, x1) on x1*y1 evaluates to y1^2 + x1^2 = 5 at x1 = 1, y1 = 2.
  const std::vector<Expr> rot{P("y1"), Expr(0), P("x1"), Expr(0)};
  const double expected = sym::eval(P("y1^2 + x1^2"), p);
  EXPECT_DOUBLE_EQ(expected, 5.0);
  EXPECT_NEAR(*directional_fd(P("x1*y1"), rot, kCoords, p), expected, 1e-7);

  const std::vector<Expr> zero(4, Expr(0));
  EXPECT_EQ(*directional_fd(P("exp(x1*y2)"), zero, kCoords, p), 0.0);
}

TEST(RankAt, Examples) {
  for (std::size_t k = 1; k <= 6; ++k) {
    std::vector<std::vector<double>> id(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) id[i][i] = 1;
    EXPECT_EQ(rank_at(id), k);
  }
  EXPECT_EQ(rank_at({{1, -2, 3}, {2, -4, 6}}), 1U);
  EXPECT_EQ(rank_at({{0, 0}, {0, 0}}), 0U);
}

// The first d rows are an upper-triangular matrix with nonzero pivots; the
// rest are random combinations of them, so the rank is known in advance.
TEST(RankAt, GenericRowsReachFullRank) {
  SplitMix64 rng(derive_seed(42, "rank"));
  auto draw = [&] { return static_cast<double>(rng.between(-1000, 1000)) / 250.0; };
  for (std::size_t d = 2; d <= 6; ++d) {
    std::vector<std::vector<double>> u(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
      u[i][i] = static_cast<double>(rng.between(1, 9)) * (rng.chance(50) ? 1 : -1);
      for (std::size_t j = i + 1; j < d; ++j) u[i][j] = draw();
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < 20; ++r) {
      std::vector<double> coeff(d);
      for (std::size_t i = 0; i < d; ++i) coeff[i] = r < d ? (r == i ? 1.0 : 0.0) : draw();
      std::vector<double> row(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) row[j] += coeff[i] * u[i][j];
      }
      rows.push_back(row);
    }
    EXPECT_EQ(rank_at(rows), std::min<std::size_t>(20, d));
  }
}

TEST(SampleStream, SameSeedSamePoints) {
  Box box;
  box.overrides[sym::x(2)] = {Rational(1, 3), Rational(5, 2)};
  SampleStream a(42, box, kCoords), b(42, box, kCoords), c(43, box, kCoords);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto pa = a.next_exact();
    EXPECT_EQ(pa, b.next_exact());
    differs = differs || pa != c.next_exact();
    EXPECT_GE(pa.at(sym::x(2)), Rational(1, 3));
    EXPECT_LE(pa.at(sym::x(2)), Rational(5, 2));
    EXPECT_LE(pa.at(sym::y(1)), Rational(1));
  }
  EXPECT_TRUE(differs);
}

TEST(SplitMix64, ReferenceValues) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
}

TEST(Batch, SerialAndParallelAgree) {
  SplitMix64 rng(derive_seed(42, "batch"));
  gen::ExprGenerator g(rng, kCoords, gen::Tier::Transcendental);
  SampleStream pts(7, {}, kCoords);
  std::vector<Valuation> points;
  for (int i = 0; i < 500; ++i) points.push_back(pts.next());
  for (int i = 0; i < 20; ++i) {
    const Expr e = g(3);
    const auto serial = eval_batch(e, points, Execution::Serial);
    const auto parallel = eval_batch(e, points, Execution::Parallel);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t j = 0; j < serial.size(); ++j) {
      if (std::isnan(serial[j])) {
        EXPECT_TRUE(std::isnan(parallel[j]));
      } else {
        EXPECT_EQ(serial[j], parallel[j]);
      }
    }
    const sym::VarId v = kCoords[rng.below(kCoords.size())];
    const Expr d = sym::partial(e, v);
    const auto fs = fd_check_batch(e, d, v, points, kDefaultStep, Execution::Serial);
    const auto fp = fd_check_batch(e, d, v, points, kDefaultStep, Execution::Parallel);
    EXPECT_EQ(fs.worst, fp.worst);
    EXPECT_EQ(fs.checked, fp.checked);
    EXPECT_LE(fs.worst, 1e-5) << e;
  }
}

}  // namespace
}  // namespace envcalc::oracle
