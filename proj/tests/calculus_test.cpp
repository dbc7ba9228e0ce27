#include <gtest/gtest.h>

#include "envcalc/calculus.hpp"
#include "envcalc/numeric.hpp"
#include "envcalc/parser.hpp"
#include "envcalc/random_algebra.hpp"
#include "test_support.hpp"

namespace envcalc {
namespace {

using sym::Expr;
using testing_support::eval_pair;
using testing_support::pair_fd;
using testing_support::scaled_gap;

const ProductModel kModel(2, 2);

Expr P(std::string_view s) { return cli::parse_expr(s); }
AElement A(std::string_view s) { return *AElement::try_from_expr(P(s)); }
EnvelopeElement E(std::string_view h, std::vector<AElement> args) { return EnvelopeElement(P(h), std::move(args)); }

// Expected coefficient flats, basis x1 x2 y1 y2.
void expect_form(const OneFormEnv& w, std::vector<std::string_view> want) {
  ASSERT_EQ(w.coeffs.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(w.coeffs[i].flat(), sym::normalize(P(want[i]))) << "coefficient " << i;
  }
}

DerivationA random_derivation(gen::AlgebraGenerator& g) {
  DerivationA x;
  for (std::size_t c = 0; c < g.model().dimension(); ++c) {
    x.values.push_back(g.rng().chance(20) ? EnvelopeElement() : g.envelope(2));
  }
  return x;
}

OneFormA random_form_a(gen::AlgebraGenerator& g) {
  OneFormA w;
  for (std::size_t c = 0; c < g.model().dimension(); ++c) w.coeffs.push_back(g.rng().chance(25) ? AElement() : g.aelement());
  return w;
}

// --- differentials -------------------------------------------------------------

TEST(DA, Examples) {
  const auto dx = d_A(kModel, A("x1"));
  EXPECT_EQ(dx.coeffs[0].flatten(), Expr(1));
  for (std::size_t c = 1; c < 4; ++c) EXPECT_TRUE(dx.coeffs[c].is_zero());

  const auto dxy = d_A(kModel, A("x1*y1"));
  EXPECT_EQ(dxy.coeffs[0].flatten(), P("y1"));
  EXPECT_TRUE(dxy.coeffs[1].is_zero());
  EXPECT_EQ(dxy.coeffs[2].flatten(), P("x1"));
  EXPECT_TRUE(dxy.coeffs[3].is_zero());

  for (const auto& c : d_A(kModel, AElement::constant(Rational(7))).coeffs) EXPECT_TRUE(c.is_zero());
}

TEST(DEnv, Examples) {
  expect_form(d_env(kModel, embed_A(A("x1"))), {"1", "0", "0", "0"});
  expect_form(d_env(kModel, E("t1 + t2", {A("x1"), A("y1")})), {"1", "0", "1", "0"});
  expect_form(d_env(kModel, E("exp(t1)", {A("x1*y1")})), {"exp(x1*y1)*y1", "0", "exp(x1*y1)*x1", "0"});
}

TEST(DEnv, ExponentialMatchesFiniteDifferences) {
  const auto e = E("exp(t1)", {A("x1*y1")});
  const auto de = d_env(kModel, e);
  auto pts = testing_support::points(3, kModel);
  for (int i = 0; i < 50; ++i) {
    const auto p = pts.next();
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_LE(oracle::fd_residual(eval_pair(de.coeffs[c], p), pair_fd(e, kModel.coordinate(c), p)), 1e-6);
    }
  }
}

TEST(DEnv, KeepsTheStructuralPair) {
  const auto e = E("sin(t1*t2)", {A("x1"), A("y2")});
  const auto de = d_env(kModel, e);
  EXPECT_EQ(de.coeffs[0].arity(), 4U);
  EXPECT_EQ(de.coeffs[0].args()[0], A("x1"));
}

class ChainRule : public ::testing::TestWithParam<gen::Tier> {};

TEST_P(ChainRule, SymbolicAndNumeric) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, static_cast<std::uint64_t>(GetParam()) + 100));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  const sym::OracleConfig cfg;
  const double tol = GetParam() == gen::Tier::Polynomial ? 1e-6 : 1e-5;
  for (int i = 0; i < 200; ++i) {
    const auto e = g.envelope();
    const auto de = d_env(kModel, e);
    EXPECT_TRUE(equal_forms(de, normalize_form(kModel, chain_preimage(kModel, e)), cfg).holds()) << e;
    auto pts = testing_support::points(rng.next(), kModel);
    for (int k = 0; k < 50; ++k) {
      const auto p = pts.next();
      for (std::size_t c = 0; c < 4; ++c) {
        const double fd = pair_fd(e, kModel.coordinate(c), p);
        const double sym = eval_pair(de.coeffs[c], p);
        if (!std::isfinite(fd) || !std::isfinite(sym)) continue;
        EXPECT_LE(oracle::fd_residual(sym, fd), tol) << e << " d" << kModel.coordinate(c).name();
      }
    }
  }
}

TEST_P(ChainRule, NaturalAlongTheEmbedding) {
  oracle::SplitMix64 rng(oracle::derive_seed(43, static_cast<std::uint64_t>(GetParam())));
  gen::AlgebraGenerator g(rng, kModel, GetParam());
  const sym::OracleConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const AElement a = g.aelement();
    EXPECT_TRUE(equal_forms(d_env(kModel, embed_A(a)), embed_form(d_A(kModel, a)), cfg).holds());
  }
}

INSTANTIATE_TEST_SUITE_P(Tiers, ChainRule, ::testing::Values(gen::Tier::Polynomial, gen::Tier::Transcendental),
                         testing_support::tier_name);

// --- the comparison map --------------------------------------------------------------

TEST(Phi, Examples) {
  const SmoothenedOneForm unit{{{EnvelopeElement::constant(Rational(1)), d_A(kModel, A("x1"))}}};
  expect_form(phi(kModel, unit), {"1", "0", "0", "0"});

  const SmoothenedOneForm s{{{E("exp(t1)", {A("x1*y1")}), d_A(kModel, A("x1*y1"))}}};
  expect_form(phi(kModel, s), {"exp(x1*y1)*y1", "0", "exp(x1*y1)*x1", "0"});

  const SmoothenedOneForm zero{{{E("exp(t1)", {A("x1*y1")}), OneFormA{std::vector<AElement>(4)}}}};
  expect_form(phi(kModel, zero), {"0", "0", "0", "0"});
}

TEST(PhiInverse, Examples) {
  OneFormEnv dx1 = zero_form(kModel);
  dx1.coeffs[0] = EnvelopeElement::constant(Rational(1));
  const auto s = phi_inverse(kModel, dx1);
  ASSERT_EQ(s.summands.size(), 1U);
  EXPECT_TRUE(s.summands[0].scalar.flat().is_one());
  EXPECT_EQ(s.summands[0].form, d_A(kModel, A("x1")));

  const auto e = E("sin(t1)", {A("x1*y1")});
  const auto pre = chain_preimage(kModel, e);
  ASSERT_EQ(pre.summands.size(), 1U);
  EXPECT_EQ(pre.summands[0].scalar.flat(), sym::normalize(P("cos(x1*y1)")));
  EXPECT_EQ(pre.summands[0].form, d_A(kModel, A("x1*y1")));
  const sym::OracleConfig cfg;
  EXPECT_TRUE(equal_forms(normalize_form(kModel, phi_inverse(kModel, d_env(kModel, e))), normalize_form(kModel, pre), cfg)
                  .holds());
}

TEST(Phi, IsBijectiveOnSeededForms) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "theorem"));
  gen::AlgebraGenerator g(rng, kModel, gen::Tier::Transcendental);
  const sym::OracleConfig cfg;
  for (int i = 0; i < 200; ++i) {
    OneFormEnv w;
    for (std::size_t c = 0; c < 4; ++c) w.coeffs.push_back(rng.chance(20) ? EnvelopeElement() : g.envelope(2));
    EXPECT_TRUE(equal_forms(phi(kModel, phi_inverse(kModel, w)), w, cfg).holds());

    SmoothenedOneForm s;
    for (std::uint64_t k = 0, n = 1 + rng.below(3); k < n; ++k) {
      EnvelopeElement a = g.envelope(2);
      OneFormA f = random_form_a(g);
      s.summands.push_back({a, f});
    }
    EXPECT_TRUE(equal_forms(normalize_form(kModel, phi_inverse(kModel, phi(kModel, s))), normalize_form(kModel, s), cfg)
                    .holds());

    // s (x) (a w) - (s a) (x) w has zero image and is zero after normalizing.
    const EnvelopeElement sc = g.envelope(2);
    const AElement a = g.aelement();
    const OneFormA f = random_form_a(g);
    OneFormA af;
    for (const auto& c : f.coeffs) af.coeffs.push_back(a * c);
    const SmoothenedOneForm z{{{sc, af}, {env_neg(env_mul(sc, embed_A(a))), f}}};
    ASSERT_TRUE(equal_forms(phi(kModel, z), zero_form(kModel), cfg).holds());
    EXPECT_TRUE(equal_forms(normalize_form(kModel, z), zero_form(kModel), cfg).holds());
  }
}

// --- derivations and the connection -------------------------------------------

TEST(Derivation, Examples) {
  const auto dx1 = coordinate_derivation(kModel, 0);
  EXPECT_TRUE(apply_derivation_A(kModel, dx1, A("x1")).flat().is_one());
  EXPECT_TRUE(apply_derivation_A(kModel, dx1, AElement::constant(Rational(3))).flat().is_zero());
  EXPECT_TRUE(apply_derivation_A(kModel, dx1, A("y1")).flat().is_zero());
  EXPECT_THROW((void)apply_derivation_A(kModel, DerivationA{{EnvelopeElement()}}, A("x1")), std::invalid_argument);
}

TEST(Derivation, RestrictionUndoesTheLift) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "pi-nabla"));
  gen::AlgebraGenerator g(rng, kModel, gen::Tier::Transcendental);
  for (int i = 0; i < 100; ++i) {
    const DerivationA x = random_derivation(g);
    EXPECT_EQ(restrict_Pi(nabla(x)).values, x.values);
  }
  const DerivationA zero{std::vector<EnvelopeElement>(4)};
  for (const auto& v : restrict_Pi(nabla(zero)).values) EXPECT_TRUE(v.flat().is_zero());
  EXPECT_TRUE(apply_derivation_env(kModel, nabla(zero), E("exp(t1)", {A("x1*y1")})).flat().is_zero());
}

TEST(Nabla, CoordinateLiftMatchesFiniteDifferences) {
  const auto e = E("exp(t1)", {A("x1*y1")});
  const auto r = apply_derivation_env(kModel, nabla(coordinate_derivation(kModel, 0)), e);
  EXPECT_EQ(r.flat(), sym::normalize(P("y1*exp(x1*y1)")));
  auto pts = testing_support::points(9, kModel);
  for (int i = 0; i < 50; ++i) {
    const auto p = pts.next();
    EXPECT_LE(oracle::fd_residual(eval_pair(r, p), pair_fd(e, sym::x(1), p)), 1e-6);
  }
}

TEST(Nabla, RotationFieldOnTheExponential) {
  const ProductModel m11(1, 1);
  const auto e = E("exp(t1)", {A("x1*y1")});
  const DerivationA x{{embed_A(A("y1")), embed_A(A("x1"))}};
  const auto r = apply_derivation_env(m11, nabla(x), e);
  EXPECT_EQ(r.flat(), sym::normalize(P("exp(x1*y1)*(y1^2 + x1^2)")));
  oracle::SampleStream pts(10, {}, m11.coordinates());
  for (int i = 0; i < 50; ++i) {
    const auto p = pts.next();
    const double fd = pair_fd(e, sym::x(1), p) * p.get(sym::y(1)) + pair_fd(e, sym::y(1), p) * p.get(sym::x(1));
    EXPECT_LE(oracle::fd_residual(eval_pair(r, p), fd), 1e-6);
  }
}

TEST(Nabla, LinearOuterFunction) {
  const auto r = apply_derivation_env(kModel, nabla(coordinate_derivation(kModel, 0)), E("t1 + t2", {A("x1"), A("y1")}));
  EXPECT_TRUE(r.flat().is_one());
}

TEST(Nabla, SameFunctionTwoRepresentations) {
  const sym::OracleConfig cfg;
  const auto a = E("t1 + t2", {A("x1"), A("y1")});
  const auto b = E("t1", {A("x1 + y1")});
  const DerivationEnv x = nabla(DerivationA{{embed_A(A("y1")), EnvelopeElement(), E("exp(t1)", {A("x2")}), embed_A(A("x1"))}});
  EXPECT_TRUE(same_function(apply_derivation_env(kModel, x, a), apply_derivation_env(kModel, x, b), cfg).holds());
}

TEST(Nabla, ConnectionProperties) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "connection"));
  gen::AlgebraGenerator g(rng, kModel, gen::Tier::Transcendental);
  const sym::OracleConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const DerivationA x = random_derivation(g);
    const auto e = g.envelope(2);
    const auto f = g.envelope(2);
    const AElement a = g.aelement();
    const auto lx = nabla(x);

    const auto leibniz = env_add(env_mul(apply_derivation_env(kModel, lx, e), f), env_mul(e, apply_derivation_env(kModel, lx, f)));
    EXPECT_TRUE(same_function(apply_derivation_env(kModel, lx, env_mul(e, f)), leibniz, cfg).holds()) << e << " * " << f;

    EXPECT_TRUE(same_function(apply_derivation_env(kModel, nabla(scale(a, x)), e),
                              env_mul(embed_A(a), apply_derivation_env(kModel, lx, e)), cfg)
                    .holds());

    if (i < 100) {
      const AElement b = g.aelement();
      const auto on_a = apply_derivation_A(kModel, x, a * b);
      const auto split = env_add(env_mul(apply_derivation_A(kModel, x, a), embed_A(b)),
                                 env_mul(embed_A(a), apply_derivation_A(kModel, x, b)));
      EXPECT_TRUE(same_function(on_a, split, cfg).holds());
      EXPECT_TRUE(same_function(apply_derivation_A(kModel, restrict_Pi(lx), a), apply_derivation_env(kModel, lx, embed_A(a)), cfg)
                      .holds());
    }
  }
}

TEST(Nabla, WellDefinedOnAlternativeRepresentations) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "well-defined"));
  gen::AlgebraGenerator g(rng, kModel, gen::Tier::Transcendental);
  const sym::OracleConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const auto e = g.envelope();
    const auto alt = g.alternative(e);
    const auto lx = nabla(random_derivation(g));
    EXPECT_TRUE(same_function(apply_derivation_env(kModel, lx, e), apply_derivation_env(kModel, lx, alt), cfg).holds());
    EXPECT_TRUE(equal_forms(d_env(kModel, e), d_env(kModel, alt), cfg).holds());
  }
}

// --- cotangent ranks -------------------------------------------------------------

TEST(CotangentRank, Examples) {
  auto pts = testing_support::points(4, kModel);
  const auto coords = coordinate_family(kModel);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(point_cotangent_rank(kModel, coords, pts.next()), 4U);

  const std::vector<EnvelopeElement> constant{EnvelopeElement::constant(Rational(5))};
  EXPECT_EQ(point_cotangent_rank(kModel, constant, pts.next()), 0U);

  const std::vector<EnvelopeElement> parallel{embed_A(A("x1")), embed_A(A("x1^2"))};
  EXPECT_EQ(point_cotangent_rank(kModel, parallel, sym::Valuation({1, 0}, {0, 0})), 1U);
  EXPECT_EQ(point_cotangent_rank(kModel, {}, sym::Valuation({1, 0}, {0, 0})), 0U);
}

TEST(CotangentRank, NamesNonFiniteMembers) {
  const std::vector<EnvelopeElement> fam{embed_A(A("x1")), E("log(t1)", {A("x1")})};
  try {
    (void)point_cotangent_rank(kModel, fam, sym::Valuation({-1, 0}, {0, 0}));
    FAIL() << "expected NonFiniteElement";
  } catch (const NonFiniteElement& e) {
    EXPECT_NE(std::string(e.what()).find("log(t1)"), std::string::npos) << e.what();
  }
}

TEST(CotangentRank, NeverExceedsTheDimension) {
  for (auto [m, n] : {std::pair{1U, 1U}, {1U, 2U}, {2U, 2U}, {3U, 1U}}) {
    const ProductModel model(m, n);
    oracle::SplitMix64 rng(oracle::derive_seed(42, m * 10 + n));
    gen::AlgebraGenerator g(rng, model, gen::Tier::Transcendental);
    std::vector<EnvelopeElement> fam = coordinate_family(model);
    for (int i = 0; i < 4; ++i) fam.push_back(g.envelope(2));
    auto pts = testing_support::points(rng.next(), model);
    for (int k = 0; k < 20; ++k) {
      const auto p = pts.next();
      EXPECT_EQ(point_cotangent_rank(model, coordinate_family(model), p), m + n);
      EXPECT_LE(point_cotangent_rank(model, fam, p), m + n);
    }
  }
}

}  // namespace
}  // namespace envcalc
