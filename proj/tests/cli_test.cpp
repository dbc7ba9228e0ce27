#include <gtest/gtest.h>
#include <json.hpp>

#include "envcalc/equality.hpp"
#include "envcalc/parser.hpp"
#include "envcalc/random_expr.hpp"
#include "envcalc/session.hpp"
#include "envcalc/suites.hpp"
#include "test_support.hpp"

namespace envcalc::cli {
namespace {

using sym::Expr;

const ProductModel kModel(2, 2);

TEST(ParseExpr, Examples) {
  const Expr e = parse_expr("exp(x1*y1) + 2/3");
  const Expr want = sym::exp(sym::variable(sym::x(1)) * sym::variable(sym::y(1))) + Expr(Rational(2, 3));
  EXPECT_EQ(e, want);
  EXPECT_EQ(sym::to_string(e), "exp(x1*y1) + 2/3");

  const Expr x1 = sym::variable(sym::x(1));
  const Expr y2 = sym::variable(sym::y(2));
  const Expr negated_sum = sym::add({x1, sym::mul({Expr(-1), sym::add({Expr(1), Expr(2) * y2})})});
  EXPECT_EQ(sym::to_string(negated_sum), "x1 - (1 + 2*y2)");
  EXPECT_EQ(parse_expr(sym::to_string(negated_sum)), negated_sum);
}

TEST(ParseExpr, ReportsPositions) {
  try {
    (void)parse_expr("x1 +");
    FAIL() << "no error";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.line(), 1U);
    EXPECT_EQ(err.column(), 5U);
  }
  EXPECT_THROW((void)parse_expr("foo(x1)"), ParseError);
  EXPECT_THROW((void)parse_expr("x3", VariableContext::product(2, 2)), ParseError);
  EXPECT_THROW((void)parse_expr("x1", VariableContext::outer()), ParseError);
  EXPECT_THROW((void)parse_expr("t1", VariableContext::product(2, 2)), ParseError);
}

TEST(ParseExpr, PythagoreanIdentityPasses) {
  const auto r = sym::equal(parse_expr("sin(x1)^2 + cos(x1)^2"), parse_expr("1"), sym::OracleConfig{});
  EXPECT_TRUE(r.holds());
  EXPECT_LT(r.residual, 1e-12);
}

class RoundTrip : public ::testing::TestWithParam<gen::Tier> {};

TEST_P(RoundTrip, ParsePrintParse) {
  oracle::SplitMix64 rng(oracle::derive_seed(42, "round-trip"));
  gen::ExprGenerator g(rng, kModel.coordinates(), GetParam());
  for (int i = 0; i < 300; ++i) {
    const Expr e = g(3);
    const Expr once = parse_expr(sym::to_string(e));
    EXPECT_EQ(parse_expr(sym::to_string(once)), once) << sym::to_string(e);
    EXPECT_EQ(sym::normalize(once), sym::normalize(e)) << sym::to_string(e);
  }
}

INSTANTIATE_TEST_SUITE_P(Tiers, RoundTrip, ::testing::Values(gen::Tier::Polynomial, gen::Tier::Transcendental),
                         testing_support::tier_name);

// --- sessions ---------------------------------------------------------------------

TEST(Session, Declarations) {
  Session s(kModel);
  s.load(
      "# comment\n"
      "\n"
      "a := x1*y2 + 3\n"
      "f := exp(x1*y1) + x2\n"
      "g := sin(t1) + t2 @ [x1*y1, y2]\n"
      "X := [y1, 0, x1, exp(x2)]\n");
  EXPECT_EQ(s.function_names(), (std::vector<std::string>{"a", "f", "g"}));
  EXPECT_EQ(s.derivation_names(), (std::vector<std::string>{"X"}));
  EXPECT_EQ(s.function("a").arity(), 1U);
  EXPECT_EQ(s.function("f").flat(), sym::normalize(parse_expr("exp(x1*y1) + x2")));
  EXPECT_EQ(s.function("g").arity(), 2U);
  EXPECT_EQ(s.function("g").flat(), sym::normalize(parse_expr("sin(x1*y1) + y2")));
  EXPECT_EQ(s.derivation("X").values[3].flat(), sym::normalize(parse_expr("exp(x2)")));
  EXPECT_THROW((void)s.function("X"), std::out_of_range);
}

TEST(Session, ErrorsCarryLineAndColumn) {
  Session s(kModel);
  try {
    s.load("f := x1\ng := x1 + * y1\n");
    FAIL() << "no error";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.line(), 2U);
    EXPECT_EQ(err.column(), 11U);
  }
  EXPECT_THROW(s.declare("f := x2"), ParseError);
  EXPECT_THROW(s.declare("h := t1 @ [x1 * exp(x1*y1)]"), ParseError);
  EXPECT_THROW(s.declare("h := t3 @ [x1, y1]"), ParseError);
  EXPECT_THROW(s.declare("Y := [x1, y1]"), ParseError);
  EXPECT_THROW(s.declare("h = x1"), ParseError);
  EXPECT_THROW(s.declare("1h := x1"), ParseError);
}

// --- suites -----------------------------------------------------------------------

TEST(Suites, UnknownName) {
  try {
    (void)suites::run_suite("nosuch", {});
    FAIL() << "no error";
  } catch (const suites::UnknownSuite& e) {
    EXPECT_NE(std::string(e.what()).find("unknown suite"), std::string::npos);
  }
}

TEST(Suites, SerialAndParallelReportsAreIdentical) {
  suites::Settings serial;
  serial.execution = Execution::Serial;
  suites::Settings parallel;
  for (const char* name : {"sym-core", "product-iso", "rank"}) {
    const std::vector<suites::Report> a{suites::run_suite(name, serial)};
    const std::vector<suites::Report> b{suites::run_suite(name, parallel)};
    EXPECT_EQ(suites::render_json(a), suites::render_json(b)) << name;
  }
}

TEST(Suites, JsonSchemaAndTextAgree) {
  suites::Settings settings;
  settings.seed = 9;
  const std::vector<suites::Report> reports{suites::run_suite("chain-rule", settings)};
  const auto j = nlohmann::json::parse(suites::render_json(reports));
  EXPECT_EQ(j.at("suite"), "chain-rule");
  EXPECT_EQ(j.at("model").at("m"), 2);
  EXPECT_EQ(j.at("model").at("n"), 2);
  EXPECT_EQ(j.at("seed"), 9);
  ASSERT_EQ(j.at("cases").size(), 200U);
  std::size_t pass = 0;
  for (const auto& c : j.at("cases")) {
    EXPECT_TRUE(c.contains("id") && c.contains("verdict") && c.contains("residual") && c.contains("detail"));
    pass += c.at("verdict") == "pass";
  }
  const auto s = reports[0].summary();
  EXPECT_EQ(j.at("summary").at("pass"), s.pass);
  EXPECT_EQ(j.at("summary").at("fail"), s.fail);
  EXPECT_EQ(j.at("summary").at("undetermined"), s.undetermined);
  EXPECT_EQ(pass, s.pass);
  const std::string text = suites::render_text(reports);
  EXPECT_NE(text.find(std::to_string(s.pass) + " pass, " + std::to_string(s.fail) + " fail"), std::string::npos);
}

TEST(Suites, SeedChangesCases) {
  suites::Settings a, b;
  b.seed = 43;
  const std::vector<suites::Report> ra{suites::run_suite("rank", a)};
  const std::vector<suites::Report> rb{suites::run_suite("rank", b)};
  EXPECT_EQ(ra[0].summary().fail, 0U);
  EXPECT_EQ(rb[0].summary().fail, 0U);
  EXPECT_NE(suites::render_json(ra), suites::render_json(rb));
}

TEST(Suites, RankReportNamesBothCandidates) {
  const auto r = suites::run_suite("rank", {});
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes[0].find("dim(M)*dim(N) = 4"), std::string::npos);
  EXPECT_NE(r.notes[0].find("measured rank = 4"), std::string::npos);
  bool flagged = false;
  for (const auto& n : r.notes) flagged = flagged || n.find("differs from the stated product formula") != std::string::npos;
  EXPECT_TRUE(flagged);
}

}  // namespace
}  // namespace envcalc::cli
