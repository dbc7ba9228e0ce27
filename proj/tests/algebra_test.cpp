#include <gtest/gtest.h>

#include "envcalc/algebra.hpp"
#include "envcalc/parser.hpp"
#include "envcalc/random_algebra.hpp"
#include "test_support.hpp"

namespace envcalc {
namespace {

using sym::Expr;
using testing_support::eval_pair;
using testing_support::scaled_gap;

Expr P(std::string_view s) { return cli::parse_expr(s); }

const Expr X1 = sym::variable(sym::x(1));
const Expr X2 = sym::variable(sym::x(2));
const Expr Y1 = sym::variable(sym::y(1));
const Expr T1 = sym::variable(sym::t(1));
const Expr T2 = sym::variable(sym::t(2));

const ProductModel kModel(2, 2);

EnvelopeElement E(std::string_view h, std::vector<AElement> args) {
  return EnvelopeElement(P(h), std::move(args));
}

AElement A(std::string_view s) { return *AElement::try_from_expr(P(s)); }

TEST(ProductModel, RejectsEmptyFactors) {
  EXPECT_THROW(ProductModel(0, 1), std::invalid_argument);
  EXPECT_THROW(ProductModel(1, 0), std::invalid_argument);
  EXPECT_EQ(ProductModel(2, 3).coordinate(2), sym::y(1));
}

TEST(AElement, GroupsAreEnforced) {
  EXPECT_THROW(AElement::from_x(Y1), GroupError);
  EXPECT_THROW(AElement::from_y(X1), GroupError);
  EXPECT_FALSE(AElement::try_from_expr(P("sin(x1*y1)")).has_value());
  EXPECT_FALSE(AElement::try_from_expr(P("t1")).has_value());
}

TEST(AElement, SplitsSeparableExpressions) {
  const auto a = AElement::try_from_expr(P("x1*y1 + x2 + 3*exp(x1)*cos(y1)"));
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->terms().size(), 3U);
  EXPECT_EQ(a->flatten(), sym::normalize(P("x1*y1 + x2 + 3*exp(x1)*cos(y1)")));
}

TEST(EnvelopeElement, RejectsBadOuterFunctions) {
  EXPECT_THROW(E("t1 + t2", {A("x1")}), std::invalid_argument);
  EXPECT_THROW(EnvelopeElement(X1 * T1, {A("x1")}), GroupError);
}

TEST(ScalarMul, Examples) {
  const auto e = env_scalar_mul(Rational(2), E("t1", {A("x1")}));
  EXPECT_EQ(e.outer(), sym::normalize(Expr(2) * T1));
  EXPECT_EQ(e.args(), std::vector<AElement>{A("x1")});
  EXPECT_EQ(e.flat(), sym::normalize(Expr(2) * X1));

  const auto g = E("exp(t1)", {A("x1*y1")});
  EXPECT_TRUE(env_scalar_mul(Rational(0), g).flat().is_zero());
  EXPECT_EQ(env_scalar_mul(Rational(1), g).flat(), g.flat());
}

TEST(Add, Examples) {
  const auto e = env_add(E("t1", {A("x1")}), E("t1", {A("y1")}));
  EXPECT_EQ(e.outer(), sym::normalize(T1 + T2));
  EXPECT_EQ(e.args(), (std::vector<AElement>{A("x1"), A("y1")}));
  EXPECT_EQ(e.flat(), sym::normalize(X1 + Y1));

  const auto g = E("exp(t1)", {A("x1*y1")});
  EXPECT_EQ(env_add(g, EnvelopeElement()).flat(), g.flat());
}

TEST(Add, ExponentialPlusCoordinateAtSeededPoints) {
  const auto e = env_add(E("exp(t1)", {A("x1*y1")}), E("t1", {A("x1")}));
  EXPECT_EQ(e.outer(), sym::normalize(P("exp(t1) + t2")));
  EXPECT_EQ(e.args(), (std::vector<AElement>{A("x1*y1"), A("x1")}));
  auto pts = testing_support::points(11, kModel);
  for (int i = 0; i < 50; ++i) {
    const auto p = pts.next();
    const double want = std::exp(p.get(sym::x(1)) * p.get(sym::y(1))) + p.get(sym::x(1));
    EXPECT_LE(scaled_gap(e.evaluate(p), want), 1e-12);
    EXPECT_LE(scaled_gap(eval_pair(e, p), want), 1e-12);
  }
}

TEST(Mul, Examples) {
  const auto e = env_mul(E("t1", {A("x1")}), E("t1", {A("y1")}));
  EXPECT_EQ(e.outer(), sym::normalize(T1 * T2));
  EXPECT_EQ(e.args(), (std::vector<AElement>{A("x1"), A("y1")}));
  EXPECT_EQ(e.flat(), sym::normalize(X1 * Y1));

  const auto g = E("exp(t1)", {A("x1*y1")});
  EXPECT_EQ(env_mul(g, EnvelopeElement::constant(Rational(1))).flat(), g.flat());
}

TEST(Mul, SineTimesCosineAtSeededPoints) {
  const auto e = env_mul(E("sin(t1)", {A("x1")}), E("cos(t1)", {A("y1")}));
  auto pts = testing_support::points(12, kModel);
  for (int i = 0; i < 50; ++i) {
    const auto p = pts.next();
    const double want = std::sin(p.get(sym::x(1))) * std::cos(p.get(sym::y(1)));
    EXPECT_LE(scaled_gap(e.evaluate(p), want), 1e-12);
    EXPECT_LE(scaled_gap(eval_pair(e, p), want), 1e-12);
  }
}

TEST(Embed, Examples) {
  const auto e = embed_A(A("x1"));
  EXPECT_EQ(e.outer(), T1);
  EXPECT_EQ(e.flat(), X1);
  EXPECT_TRUE(embed_A(AElement::constant(Rational(1))).flat().is_one());
  const AElement a({{X1, Y1}, {X2, Expr(1)}});
  EXPECT_EQ(embed_A(a).flat(), sym::normalize(X1 * Y1 + X2));
}

TEST(Flatten, Examples) {
  EXPECT_EQ(flatten(E("exp(t1)", {A("x1*y1")})), sym::normalize(P("exp(x1*y1)")));
  EXPECT_EQ(flatten(E("t1 + t2", {A("x1"), A("y1")})), sym::normalize(X1 + Y1));
  EXPECT_EQ(flatten(E("t1^2", {A("x1 + y1")})), sym::normalize(P("x1^2 + 2*x1*y1 + y1^2")));
}

TEST(Mirror, SwapsFactors) {
  const auto e = mirror(E("exp(t1)", {A("x1*cos(y2)")}));
  EXPECT_EQ(e.flat(), sym::normalize(P("exp(y1*cos(x2))")));
}

// --- properties --------------------------------------------------------------

class EnvelopeLaws : public ::testing::TestWithParam<gen::Tier> {};

TEST_P(EnvelopeLaws, FlatsFollowTheOperations) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "envelope-laws"));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  const sym::OracleConfig cfg;
  auto pts = testing_support::points(5, kModel);
  for (int i = 0; i < 200; ++i) {
    const auto e = g.envelope();
    const auto f = g.envelope();
    const auto h = g.envelope();
    const Rational r(static_cast<long>(rng.between(-5, 5)), static_cast<long>(rng.between(1, 4)));

    EXPECT_TRUE(sym::equal(env_add(e, f).flat(), e.flat() + f.flat(), cfg).holds()) << e << " + " << f;
    EXPECT_TRUE(sym::equal(env_mul(e, f).flat(), e.flat() * f.flat(), cfg).holds()) << e << " * " << f;
    EXPECT_TRUE(sym::equal(env_scalar_mul(r, e).flat(), Expr(r) * e.flat(), cfg).holds()) << e;

    EXPECT_TRUE(same_function(env_add(e, f), env_add(f, e), cfg).holds());
    EXPECT_TRUE(same_function(env_mul(e, f), env_mul(f, e), cfg).holds());
    EXPECT_TRUE(same_function(env_add(env_add(e, f), h), env_add(e, env_add(f, h)), cfg).holds());
    EXPECT_TRUE(same_function(env_mul(env_mul(e, f), h), env_mul(e, env_mul(f, h)), cfg).holds());
    EXPECT_TRUE(same_function(env_mul(e, env_add(f, h)), env_add(env_mul(e, f), env_mul(e, h)), cfg)
                    .holds());

    // The cached flat agrees with composing numerically.
    const auto p = pts.next();
    const double direct = eval_pair(e, p);
    if (std::isfinite(direct)) EXPECT_LE(scaled_gap(e.evaluate(p), direct), 1e-9) << e;
  }
}

TEST_P(EnvelopeLaws, EmbeddingIsAnAlgebraMorphism) {
  oracle::SplitMix64 rng(oracle::derive_seed(43, "embed"));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  const sym::OracleConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const AElement a = g.aelement();
    const AElement b = g.aelement();
    EXPECT_TRUE(same_function(embed_A(a * b), env_mul(embed_A(a), embed_A(b)), cfg).holds());
    EXPECT_TRUE(same_function(embed_A(a + b), env_add(embed_A(a), embed_A(b)), cfg).holds());
  }
}

TEST_P(EnvelopeLaws, RingOperationsKeepSeparability) {
  oracle::SplitMix64 rng(oracle::derive_seed(44, "separable"));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  auto pts = testing_support::points(6, kModel);
  for (int i = 0; i < 200; ++i) {
    const AElement a = g.aelement();
    const AElement b = g.aelement();
    for (const AElement& c : {a * b, a + b, a - b}) {
      for (const auto& term : c.terms()) {
        EXPECT_TRUE(term.f.only_group(sym::Group::X));
        EXPECT_TRUE(term.g.only_group(sym::Group::Y));
      }
    }
    const AElement prod = a * b;
    EXPECT_LE(prod.terms().size(), a.terms().size() * b.terms().size());
    const auto p = pts.next();
    const double want = testing_support::eval_terms(a, p) * testing_support::eval_terms(b, p);
    if (std::isfinite(want)) EXPECT_LE(scaled_gap(testing_support::eval_terms(prod, p), want), 1e-9);
  }
}

TEST_P(EnvelopeLaws, AlternativeRepresentationsAreTheSameFunction) {
  oracle::SplitMix64 rng(oracle::derive_seed(45, "alternative"));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  const sym::OracleConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const auto e = g.envelope();
    const auto alt = g.alternative(e);
    EXPECT_FALSE(alt == e);
    EXPECT_TRUE(same_function(e, alt, cfg).holds()) << e << " vs " << alt;
  }
}

INSTANTIATE_TEST_SUITE_P(Tiers, EnvelopeLaws,
                         ::testing::Values(gen::Tier::Polynomial, gen::Tier::Transcendental),
                         testing_support::tier_name);

}  // namespace
}  // namespace envcalc
