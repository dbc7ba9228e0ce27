#include "envcalc/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "envcalc/calculus.hpp"
#include "envcalc/localization.hpp"
#include "envcalc/modules.hpp"
#include "envcalc/numeric.hpp"
#include "envcalc/random_algebra.hpp"
#include "envcalc/random_expr.hpp"

namespace envcalc::suites {

using sym::Expr;

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Undetermined: return "undetermined";
  }
  return "?";
}

Summary Report::summary() const {
  Summary s;
  for (const auto& c : cases) {
    switch (c.verdict) {
      case Outcome::Pass: ++s.pass; break;
      case Outcome::Fail: ++s.fail; break;
      case Outcome::Undetermined: ++s.undetermined; break;
    }
  }
  return s;
}

double Report::worst_residual() const {
  double w = 0;
  for (const auto& c : cases) w = std::max(w, c.residual);
  return w;
}

UnknownSuite::UnknownSuite(std::string_view name)
    : std::invalid_argument("unknown suite '" + std::string(name) + "'") {}

namespace {

double fd_tolerance(gen::Tier t) { return t == gen::Tier::Polynomial ? 1e-6 : 1e-5; }

// Accumulates the checks of one case.
class Checks {
 public:
  explicit Checks(std::string context) : detail_(std::move(context)) {}

  void require(const sym::EqualityResult& r, std::string_view what) {
    residual_ = std::max(residual_, r.residual);
    if (r.verdict == sym::Verdict::NotEqual) {
      fail(std::string(what) + " not equal");
    } else if (r.verdict == sym::Verdict::Undetermined) {
      undetermined(what);
    }
  }

  void bound(double residual, double tol, std::string_view what) {
    if (std::isnan(residual) || residual > tol) {
      std::ostringstream os;
      os << what << " residual " << residual << " > " << tol;
      fail(os.str());
    }
    if (!std::isnan(residual)) residual_ = std::max(residual_, residual);
  }

  void undetermined(std::string_view what) {
    if (verdict_ == Outcome::Pass) verdict_ = Outcome::Undetermined;
    note(std::string(what) + " undetermined");
  }

  void expect(bool ok, std::string_view what) {
    if (!ok) fail(std::string(what));
  }

  void fail(const std::string& why) {
    verdict_ = Outcome::Fail;
    note(why);
  }

  void note(const std::string& text) { detail_ += (detail_.empty() ? "" : "; ") + text; }

  [[nodiscard]] Case finish(std::string id) const { return Case{std::move(id), verdict_, residual_, detail_}; }

 private:
  Outcome verdict_ = Outcome::Pass;
  double residual_ = 0.0;
  std::string detail_;
};

std::string describe(const EnvelopeElement& e) {
  std::ostringstream os;
  os << e;
  return os.str();
}

// H evaluated at the evaluated arguments; independent of the cached flat.
double eval_pair(const EnvelopeElement& e, const sym::Valuation& p) {
  sym::Valuation t = p;
  for (std::size_t i = 0; i < e.arity(); ++i) {
    t.set(sym::t(static_cast<std::uint32_t>(i + 1)), sym::eval(e.args()[i].flatten(), p));
  }
  return sym::eval(e.outer(), t);
}

double pair_fd(const EnvelopeElement& e, sym::VarId v, const sym::Valuation& p) {
  const double h = oracle::kDefaultStep;
  sym::Valuation plus = p, minus = p;
  plus.set(v, p.get(v) + h);
  minus.set(v, p.get(v) - h);
  return (eval_pair(e, plus) - eval_pair(e, minus)) / (2 * h);
}

double scaled_gap(double a, double b) { return std::abs(a - b) / (1 + std::max(std::abs(a), std::abs(b))); }

struct Context {
  const Settings& settings;
  sym::OracleConfig cfg;
  std::uint64_t suite_seed;

  [[nodiscard]] const ProductModel& model() const { return settings.model; }
  [[nodiscard]] std::uint64_t case_seed(std::size_t i) const { return oracle::derive_seed(suite_seed, i); }
};

using CaseFn = std::function<Case(const Context&, std::size_t)>;

// Runs cases [0, count) with per-case seeds; an exception fails its case.
std::vector<Case> fan_out(const Context& ctx, std::size_t count, const std::string& prefix, const CaseFn& fn) {
  return map_indexed<Case>(
      count,
      [&](std::size_t i) {
        try {
          return fn(ctx, i);
        } catch (const std::exception& ex) {
          return Case{prefix + "/" + std::to_string(i), Outcome::Fail, 0.0, std::string("error: ") + ex.what()};
        }
      },
      ctx.settings.execution);
}

void append(std::vector<Case>& out, std::vector<Case> more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

std::string case_id(std::string_view prefix, std::size_t i) { return std::string(prefix) + "/" + std::to_string(i); }

gen::Tier alternating(std::size_t i) { return i % 2 == 0 ? gen::Tier::Polynomial : gen::Tier::Transcendental; }

// --- sym-core ------------------------------------------------------------------

void sym_core(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 1000, "sym-core", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    const auto vars = c.model().coordinates();
    const gen::Tier tier = alternating(i);
    gen::ExprGenerator g(rng, vars, tier);
    const Expr e = g(3);
    const Expr f = g(2);
    const sym::VarId u = vars[rng.below(vars.size())];
    const sym::VarId v = vars[rng.below(vars.size())];
    Checks ck(std::string("tier ") + gen::to_string(tier));

    const Expr n = sym::normalize(e);
    ck.expect(sym::normalize(n) == n, "normalize not idempotent on " + sym::to_string(e));
    ck.require(sym::equal(sym::partial(sym::partial(e, u), v), sym::partial(sym::partial(e, v), u), c.cfg), "schwarz");
    ck.require(sym::equal(sym::partial(e * f, v), sym::partial(e, v) * f + e * sym::partial(f, v), c.cfg), "leibniz");

    oracle::SampleStream pts(rng.next(), {}, vars);
    const auto p = pts.next();
    const auto fd = oracle::central_fd(e, v, p);
    const auto fd2 = oracle::central_fd(e, v, p, 2 * oracle::kDefaultStep);
    const double d = sym::eval(sym::partial(e, v), p);
    if (fd && fd2 && std::isfinite(d)) {
      if (oracle::fd_truncation(*fd, *fd2) > fd_tolerance(tier) / 10) {
        ck.undetermined("partial vs central difference (step does not resolve e)");
      } else {
        ck.bound(oracle::fd_residual(d, *fd), fd_tolerance(tier), "partial vs central difference");
      }
    }
    return ck.finish(case_id("sym-core", i));
  });
}

// --- algebra-laws ----------------------------------------------------------------

void algebra_laws(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 200, "algebra-laws", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    const gen::Tier tier = alternating(i);
    gen::AlgebraGenerator g(rng, c.model(), tier);
    const auto e = g.envelope();
    const auto f = g.envelope();
    const auto h = g.envelope();
    const AElement a = g.aelement();
    const AElement b = g.aelement();
    Checks ck(std::string("tier ") + gen::to_string(tier));

    ck.require(sym::equal(env_add(e, f).flat(), e.flat() + f.flat(), c.cfg), "flat of sum");
    ck.require(sym::equal(env_mul(e, f).flat(), e.flat() * f.flat(), c.cfg), "flat of product");
    ck.require(same_function(env_add(e, f), env_add(f, e), c.cfg), "additive commutativity");
    ck.require(same_function(env_mul(e, f), env_mul(f, e), c.cfg), "multiplicative commutativity");
    ck.require(same_function(env_add(env_add(e, f), h), env_add(e, env_add(f, h)), c.cfg), "additive associativity");
    ck.require(same_function(env_mul(env_mul(e, f), h), env_mul(e, env_mul(f, h)), c.cfg),
               "multiplicative associativity");
    ck.require(same_function(env_mul(e, env_add(f, h)), env_add(env_mul(e, f), env_mul(e, h)), c.cfg),
               "distributivity");
    ck.require(same_function(env_add(e, EnvelopeElement()), e, c.cfg), "additive unit");
    ck.require(same_function(env_mul(e, EnvelopeElement::constant(Rational(1))), e, c.cfg), "multiplicative unit");
    ck.require(same_function(env_add(e, env_neg(e)), EnvelopeElement(), c.cfg), "additive inverse");
    ck.require(same_function(embed_A(a * b), env_mul(embed_A(a), embed_A(b)), c.cfg), "embedding of a product");
    ck.require(same_function(embed_A(a + b), env_add(embed_A(a), embed_A(b)), c.cfg), "embedding of a sum");

    // Composing numerically must reproduce the cached flat.
    auto pts = oracle::SampleStream(rng.next(), {}, c.model().coordinates());
    for (int k = 0; k < 10; ++k) {
      const auto p = pts.next();
      for (const auto* x : {&e, &f, &h}) {
        const double direct = eval_pair(*x, p);
        if (std::isfinite(direct)) ck.bound(scaled_gap(x->evaluate(p), direct), 1e-9, "flat vs composition");
      }
    }
    return ck.finish(case_id("algebra-laws", i));
  });
}

// --- chain-rule -------------------------------------------------------------------

void chain_rule(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 200, "chain-rule", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    const gen::Tier tier = alternating(i);
    gen::AlgebraGenerator g(rng, c.model(), tier);
    const auto e = g.envelope();
    Checks ck(std::string("tier ") + gen::to_string(tier));
    const OneFormEnv de = d_env(c.model(), e);
    ck.require(equal_forms(de, normalize_form(c.model(), chain_preimage(c.model(), e)), c.cfg), "chain rule");

    double worst = 0;
    auto pts = oracle::SampleStream(rng.next(), {}, c.model().coordinates());
    for (int k = 0; k < 50; ++k) {
      const auto p = pts.next();
      for (std::size_t v = 0; v < c.model().dimension(); ++v) {
        const double fd = pair_fd(e, c.model().coordinate(v), p);
        const double sym = eval_pair(de.coeffs[v], p);
        if (!std::isfinite(fd) || !std::isfinite(sym)) continue;
        worst = std::max(worst, oracle::fd_residual(sym, fd));
      }
    }
    ck.bound(worst, fd_tolerance(tier), "differential vs central difference");
    if (ck.finish("").verdict == Outcome::Fail) ck.note(describe(e));
    return ck.finish(case_id("chain-rule", i));
  });
}

// --- phi is bijective -------------------------------------------------------------------

OneFormA random_form_a(gen::AlgebraGenerator& g) {
  OneFormA w;
  for (std::size_t c = 0; c < g.model().dimension(); ++c) {
    w.coeffs.push_back(g.rng().chance(25) ? AElement() : g.aelement());
  }
  return w;
}

void phi_bijective(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 200, "phi-after-inverse", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    OneFormEnv w;
    for (std::size_t k = 0; k < c.model().dimension(); ++k) {
      w.coeffs.push_back(rng.chance(20) ? EnvelopeElement() : g.envelope(2));
    }
    Checks ck("");
    ck.require(equal_forms(phi(c.model(), phi_inverse(c.model(), w)), w, c.cfg), "phi after phi_inverse");
    return ck.finish(case_id("phi-after-inverse", i));
  });
  append(r.cases, fan_out(ctx, 200, "inverse-after-phi", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "inverse"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    SmoothenedOneForm s;
    for (std::uint64_t k = 0, n = 1 + rng.below(3); k < n; ++k) {
      EnvelopeElement a = g.envelope(2);
      OneFormA f = random_form_a(g);
      s.summands.push_back({std::move(a), std::move(f)});
    }
    Checks ck("");
    ck.require(equal_forms(normalize_form(c.model(), phi_inverse(c.model(), phi(c.model(), s))),
                           normalize_form(c.model(), s), c.cfg),
               "phi_inverse after phi");

    // A form with zero image is zero after normalizing.
    const EnvelopeElement sc = g.envelope(2);
    const AElement a = g.aelement();
    const OneFormA f = random_form_a(g);
    OneFormA af;
    for (const auto& x : f.coeffs) af.coeffs.push_back(a * x);
    const SmoothenedOneForm z{{{sc, af}, {env_neg(env_mul(sc, embed_A(a))), f}}};
    ck.require(equal_forms(phi(c.model(), z), zero_form(c.model()), c.cfg), "image of the balanced form");
    ck.require(equal_forms(normalize_form(c.model(), z), zero_form(c.model()), c.cfg), "balanced form");
    return ck.finish(case_id("inverse-after-phi", i));
  }));
}

// --- connection -----------------------------------------------------------------

DerivationA random_derivation(gen::AlgebraGenerator& g) {
  DerivationA x;
  for (std::size_t c = 0; c < g.model().dimension(); ++c) {
    x.values.push_back(g.rng().chance(20) ? EnvelopeElement() : g.envelope(2));
  }
  return x;
}

void connection(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 100, "restriction", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const DerivationA x = random_derivation(g);
    Checks ck("");
    ck.expect(restrict_Pi(nabla(x)).values == x.values, "restriction of the lift differs from X");
    return ck.finish(case_id("restriction", i));
  });
  append(r.cases, fan_out(ctx, 100, "leibniz", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "leibniz"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const DerivationA x = random_derivation(g);
    const auto e = g.envelope(2);
    const auto f = g.envelope(2);
    const AElement a = g.aelement();
    const auto lx = nabla(x);
    const auto& m = c.model();
    Checks ck("");
    const auto lx_e = apply_derivation_env(m, lx, e);
    ck.require(same_function(apply_derivation_env(m, lx, env_mul(e, f)),
                             env_add(env_mul(lx_e, f), env_mul(e, apply_derivation_env(m, lx, f))), c.cfg),
               "leibniz");
    ck.require(same_function(apply_derivation_env(m, nabla(scale(a, x)), e), env_mul(embed_A(a), lx_e), c.cfg),
               "A-linearity in X");
    ck.require(same_function(apply_derivation_env(m, lx, embed_A(a)), apply_derivation_A(m, x, a), c.cfg),
               "extends X");

    // Directional differences of the flat along the values of X.
    std::vector<Expr> direction;
    for (const auto& v : x.values) direction.push_back(v.flat());
    const auto coords = m.coordinates();
    auto pts = oracle::SampleStream(rng.next(), {}, coords);
    // Points where the step does not resolve e.flat() are skipped.
    const double tol = fd_tolerance(gen::Tier::Transcendental);
    double worst = 0;
    int used = 0, unresolved = 0;
    for (int k = 0; k < 10; ++k) {
      const auto p = pts.next();
      const auto fd = oracle::directional_fd(e.flat(), direction, coords, p);
      const auto fd2 = oracle::directional_fd(e.flat(), direction, coords, p, 2 * oracle::kDefaultStep);
      const double sym = lx_e.evaluate(p);
      if (!fd || !fd2 || !std::isfinite(sym)) continue;
      if (oracle::fd_truncation(*fd, *fd2) > tol / 10) {
        ++unresolved;
        continue;
      }
      worst = std::max(worst, oracle::fd_residual(sym, *fd));
      ++used;
    }
    if (unresolved > 0) ck.note(std::to_string(unresolved) + " of 10 points not resolved by the difference step");
    if (used == 0) {
      ck.undetermined("lift vs directional difference");
    } else {
      ck.bound(worst, tol, "lift vs directional difference");
    }
    return ck.finish(case_id("leibniz", i));
  }));
  append(r.cases, fan_out(ctx, 100, "well-defined", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "well-defined"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const auto e = g.envelope();
    const auto alt = g.alternative(e);
    const auto lx = nabla(random_derivation(g));
    Checks ck("");
    ck.expect(!(alt == e), "representations coincide");
    const auto on_e = apply_derivation_env(c.model(), lx, e);
    const auto on_alt = apply_derivation_env(c.model(), lx, alt);
    ck.require(same_function(on_e, on_alt, c.cfg), "lift on two representations");
    ck.bound(sym::sampled_residual(on_e.flat(), on_alt.flat(), c.cfg), 1e-6, "lift on two representations");
    return ck.finish(case_id("well-defined", i));
  }));
}

// --- localization -----------------------------------------------------------------------

std::vector<double> eval_vector(const AVector& v, const sym::Valuation& p) {
  std::vector<double> out;
  for (const auto& a : v.coeffs) out.push_back(sym::eval(a.flatten(), p));
  return out;
}

std::vector<double> fiber(const TensorFraction& fr, std::size_t gens, const sym::Valuation& p) {
  std::vector<double> out(gens, 0.0);
  const double g = eval_pair(fr.den, p);
  for (const auto& s : fr.num.summands) {
    const double f = eval_pair(s.scalar, p);
    const auto v = eval_vector(s.vector, p);
    for (std::size_t j = 0; j < gens; ++j) out[j] += f * v[j] / g;
  }
  return out;
}

std::vector<double> fiber(const LocalTensor& t, std::size_t gens, const sym::Valuation& p) {
  std::vector<double> out(gens, 0.0);
  for (const auto& s : t.summands) {
    const double f = eval_pair(s.scalar.num, p) / eval_pair(s.scalar.den, p);
    const double h = sym::eval(s.vector.den.flatten(), p);
    const auto v = eval_vector(s.vector.num, p);
    for (std::size_t j = 0; j < gens; ++j) out[j] += f * v[j] / h;
  }
  return out;
}

double worst_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, scaled_gap(a[i], b[i]));
  return w;
}

Region localization_region(const ProductModel& m) { return Region(m, {{sym::x(1), {Rational(1, 2), Rational(3, 2)}}}); }

void localization(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 50, "backward-after-forward", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const Region u = localization_region(c.model());
    const auto gens = static_cast<std::size_t>(rng.between(1, 3));
    const auto loc = localize(g.presentation(gens, rng.below(gens)), u);
    const auto fr = loc.fraction(g.tensor(gens, 2), g.positive_envelope());
    const auto back = join_fractions(loc, split_fraction(loc, fr));
    Checks ck("");
    ck.require(loc.equal(back, fr, c.cfg), "backward after forward");
    auto pts = oracle::SampleStream(rng.next(), u.sampling_box(), c.model().coordinates());
    for (int k = 0; k < 5; ++k) {
      const auto p = pts.next();
      ck.bound(worst_gap(fiber(back, gens, p), fiber(fr, gens, p)), 1e-9, "fiber");
    }
    return ck.finish(case_id("backward-after-forward", i));
  });
  append(r.cases, fan_out(ctx, 50, "forward-after-backward", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "forward"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const Region u = localization_region(c.model());
    const auto gens = static_cast<std::size_t>(rng.between(1, 3));
    const auto loc = localize(g.presentation(gens, rng.below(gens)), u);
    std::vector<LocalTensor::Summand> terms;
    for (std::uint64_t j = 0, k = 1 + rng.below(2); j < k; ++j) {
      EnvelopeElement num = g.envelope(2);
      EnvelopeElement den = g.positive_envelope();
      AVector v = g.avector(gens);
      AElement h = g.positive_aelement();
      terms.push_back({{std::move(num), std::move(den)}, {std::move(v), std::move(h)}});
    }
    const auto s = loc.local_tensor(std::move(terms));
    const auto again = split_fraction(loc, join_fractions(loc, s));
    Checks ck("");
    ck.require(loc.equal(again, s, c.cfg), "forward after backward");
    auto pts = oracle::SampleStream(rng.next(), u.sampling_box(), c.model().coordinates());
    for (int k = 0; k < 5; ++k) {
      const auto p = pts.next();
      ck.bound(worst_gap(fiber(again, gens, p), fiber(s, gens, p)), 1e-9, "fiber");
    }
    return ck.finish(case_id("forward-after-backward", i));
  }));
  // Free presentations on the region: the fiber keeps its dimension after
  // smoothening.
  append(r.cases, fan_out(ctx, 20, "fiber-rank", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "rank"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const Region u = localization_region(c.model());
    const auto gens = static_cast<std::size_t>(rng.between(1, 4));
    const AModule p = g.presentation(gens, 0);
    const EnvModule sp = smoothen(p);
    Checks ck("free, generators " + std::to_string(gens));
    auto pts = oracle::SampleStream(rng.next(), u.sampling_box(), c.model().coordinates());
    for (int k = 0; k < 20; ++k) {
      const auto pt = pts.next();
      const auto dp = fiber_dimension(p, pt);
      const auto dsp = fiber_dimension(sp, pt);
      if (dp != gens || dsp != gens) {
        ck.fail("fiber dimension " + std::to_string(dp) + " and " + std::to_string(dsp) + " after smoothening, expected " +
                std::to_string(gens));
        break;
      }
    }
    return ck.finish(case_id("fiber-rank", i));
  }));
  append(r.cases, fan_out(ctx, 20, "presented-rank", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "presented"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const auto gens = static_cast<std::size_t>(rng.between(1, 4));
    const auto rels = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(gens)));
    const AModule p = g.presentation(gens, rels);
    const EnvModule sp = smoothen(p);
    Checks ck("generators " + std::to_string(gens) + ", relations " + std::to_string(rels));
    auto pts = oracle::SampleStream(rng.next(), {}, c.model().coordinates());
    for (int k = 0; k < 20; ++k) {
      const auto pt = pts.next();
      const auto dp = fiber_dimension(p, pt);
      const auto dsp = fiber_dimension(sp, pt);
      if (dp != dsp) {
        ck.fail("fiber dimension " + std::to_string(dp) + " becomes " + std::to_string(dsp) + " after smoothening");
        break;
      }
    }
    return ck.finish(case_id("presented-rank", i));
  }));
}

// --- product isomorphism ------------------------------------------------------------------------

void product_iso(const Context& ctx, Report& r) {
  r.cases = fan_out(ctx, 50, "product", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(c.case_seed(i));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const auto gens = static_cast<std::size_t>(rng.between(1, 3));
    const EnvModule q = smoothen(g.presentation(gens, rng.below(gens), sym::Group::Y));
    ProductSource s;
    ProductTarget t;
    for (std::uint64_t k = 0, n = 1 + rng.below(3); k < n; ++k) {
      EnvelopeElement h = g.envelope(2);
      Expr f = g.x_function();
      AVector v = g.avector_in(sym::Group::Y, gens);
      s.summands.push_back({std::move(h), std::move(f), std::move(v)});
      EnvelopeElement h2 = g.envelope(2);
      AVector v2 = g.avector_in(sym::Group::Y, gens);
      t.summands.push_back({std::move(h2), std::move(v2)});
    }
    Checks ck("");
    ck.require(equal_mod(q, normalize_source(product_backward(product_forward(s)), gens), normalize_source(s, gens), c.cfg),
               "backward after forward");
    ck.require(equal_mod(q, normalize_target(product_forward(product_backward(t)), gens), normalize_target(t, gens), c.cfg),
               "forward after backward");
    const EnvelopeElement a = g.envelope(2);
    ck.require(equal_mod(q, normalize_target(product_forward(scale(a, s)), gens),
                         normalize_target(scale(a, product_forward(s)), gens), c.cfg),
               "linearity");

    auto pts = oracle::SampleStream(rng.next(), {}, c.model().coordinates());
    const auto fwd = normalize_target(product_forward(s), gens);
    for (int k = 0; k < 5; ++k) {
      const auto pt = pts.next();
      std::vector<double> want(gens, 0.0);
      for (const auto& term : s.summands) {
        const double w = eval_pair(term.scalar, pt) * sym::eval(term.f, pt);
        const auto v = eval_vector(term.q, pt);
        for (std::size_t j = 0; j < gens; ++j) want[j] += w * v[j];
      }
      std::vector<double> got;
      for (const auto& x : fwd.coeffs) got.push_back(eval_pair(x, pt));
      ck.bound(worst_gap(got, want), 1e-9, "forward image");
    }
    return ck.finish(case_id("product", i));
  });
  append(r.cases, fan_out(ctx, 50, "mirrored", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "mirrored"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    const auto gens = static_cast<std::size_t>(rng.between(1, 3));
    const EnvModule sp = smoothen(g.presentation(gens, rng.below(gens), sym::Group::X));
    ProductSource s;
    for (std::uint64_t k = 0, n = 1 + rng.below(3); k < n; ++k) {
      EnvelopeElement h = g.envelope(2);
      Expr f = g.y_function();
      AVector v = g.avector_in(sym::Group::X, gens);
      s.summands.push_back({std::move(h), std::move(f), std::move(v)});
    }
    const ProductTarget t = product_forward_mirrored(s);
    Checks ck("");
    ck.require(equal_mod(sp, normalize_source(product_backward_mirrored(t), gens), normalize_source(s, gens), c.cfg),
               "backward after forward");
    ck.require(equal_mod(sp, normalize_target(product_forward_mirrored(product_backward_mirrored(t)), gens),
                         normalize_target(t, gens), c.cfg),
               "forward after backward");
    return ck.finish(case_id("mirrored", i));
  }));
}

// --- rank ------------------------------------------------------------------------

std::string model_label(const ProductModel& m) {
  return "m=" + std::to_string(m.m()) + ",n=" + std::to_string(m.n());
}

// Rank of the coordinate differentials at `count` points of one model.
// Passes while the rank is stable and at most m+n.
std::vector<Case> coordinate_ranks(const Context& ctx, const ProductModel& model, std::size_t count,
                                   const std::string& prefix, std::uint64_t seed, std::vector<std::size_t>& ranks) {
  const auto family = coordinate_family(model);
  ranks = map_indexed<std::size_t>(
      count,
      [&](std::size_t i) {
        oracle::SampleStream pts(oracle::derive_seed(seed, i), {}, model.coordinates());
        return point_cotangent_rank(model, family, pts.next());
      },
      ctx.settings.execution);
  std::vector<Case> out;
  for (std::size_t i = 0; i < count; ++i) {
    Checks ck("rank " + std::to_string(ranks[i]) + ", m*n " + std::to_string(model.m() * model.n()) + ", m+n " +
              std::to_string(model.dimension()));
    ck.expect(ranks[i] == ranks.front(), "rank differs from the first point");
    ck.expect(ranks[i] <= model.dimension(), "rank exceeds m+n");
    out.push_back(ck.finish(case_id(prefix, i)));
  }
  return out;
}

std::string rank_note(const ProductModel& m, const std::vector<std::size_t>& ranks) {
  const std::size_t measured = ranks.empty() ? 0 : ranks.front();
  bool stable = true;
  for (const auto r : ranks) stable = stable && r == measured;
  const std::size_t product = static_cast<std::size_t>(m.m()) * m.n();
  std::string s = model_label(m) + ": stated dim(M)*dim(N) = " + std::to_string(product) + ", measured rank = " +
                  (stable ? std::to_string(measured) : std::string("unstable")) + ", m+n = " +
                  std::to_string(m.dimension());
  if (stable && measured != product) {
    s += "; measured rank differs from the stated product formula (documented ambiguity)";
  } else if (stable && product == m.dimension()) {
    s += "; both candidate values coincide for this model";
  }
  return s;
}

void rank(const Context& ctx, Report& r) {
  std::vector<std::size_t> ranks;
  r.cases = coordinate_ranks(ctx, ctx.model(), 100, "coordinates", oracle::derive_seed(ctx.suite_seed, "points"), ranks);
  r.notes.push_back(rank_note(ctx.model(), ranks));

  // Other models, where m*n and m+n differ.
  for (const auto& [m, n] : {std::pair{1U, 1U}, {1U, 3U}, {2U, 3U}, {3U, 3U}}) {
    const ProductModel model(m, n);
    if (model == ctx.model()) continue;
    auto cases = coordinate_ranks(ctx, model, 10, "sweep/" + model_label(model),
                                  oracle::derive_seed(ctx.suite_seed, model_label(model)), ranks);
    r.notes.push_back(rank_note(model, ranks));
    append(r.cases, std::move(cases));
  }

  // Larger random families never exceed m+n.
  append(r.cases, fan_out(ctx, 20, "random-family", [](const Context& c, std::size_t i) {
    oracle::SplitMix64 rng(oracle::derive_seed(c.case_seed(i), "family"));
    gen::AlgebraGenerator g(rng, c.model(), gen::Tier::Transcendental);
    std::vector<EnvelopeElement> family;
    for (std::size_t k = 0; k < c.model().dimension() + 2; ++k) family.push_back(g.envelope(2));
    oracle::SampleStream pts(rng.next(), {}, c.model().coordinates());
    const auto rk = point_cotangent_rank(c.model(), family, pts.next());
    Checks ck("rank " + std::to_string(rk) + " for " + std::to_string(family.size()) + " elements");
    ck.expect(rk <= c.model().dimension(), "rank exceeds m+n");
    return ck.finish(case_id("random-family", i));
  }));
}

using SuiteFn = void (*)(const Context&, Report&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> kSuites{
      {"sym-core", sym_core}, {"algebra-laws", algebra_laws}, {"chain-rule", chain_rule},
      {"theorem4", phi_bijective}, {"connection", connection},     {"localization", localization},
      {"product-iso", product_iso},       {"rank", rank},
  };
  return kSuites;
}

nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["model"] = {{"m", r.m}, {"n", r.n}};
  j["seed"] = r.seed;
  auto cases = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"id", c.id}, {"verdict", to_string(c.verdict)}, {"residual", c.residual}, {"detail", c.detail}});
  }
  j["cases"] = std::move(cases);
  const auto s = r.summary();
  j["summary"] = {{"pass", s.pass}, {"fail", s.fail}, {"undetermined", s.undetermined}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return kNames;
}

Report run_suite(std::string_view name, const Settings& settings) {
  for (const auto& [suite, fn] : registry()) {
    if (suite != name) continue;
    const auto start = std::chrono::steady_clock::now();
    Context ctx{settings, settings.oracle, oracle::derive_seed(settings.seed, name)};
    ctx.cfg.seed = settings.seed;
    ctx.cfg.validate();
    Report r;
    r.suite = suite;
    r.m = settings.model.m();
    r.n = settings.model.n();
    r.seed = settings.seed;
    fn(ctx, r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw UnknownSuite(name);
}

std::string render_json(std::span<const Report> reports) {
  if (reports.size() == 1) return to_json(reports[0]).dump(2) + "\n";
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  Summary total;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    const auto s = r.summary();
    total.pass += s.pass;
    total.fail += s.fail;
    total.undetermined += s.undetermined;
  }
  j["suites"] = std::move(arr);
  j["summary"] = {{"pass", total.pass}, {"fail", total.fail}, {"undetermined", total.undetermined}};
  return j.dump(2) + "\n";
}

std::string render_text(std::span<const Report> reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    const auto s = r.summary();
    os << r.suite << " (model " << r.m << "," << r.n << ", seed " << r.seed << "): " << s.pass << " pass, " << s.fail
       << " fail, " << s.undetermined << " undetermined, worst residual " << r.worst_residual() << "\n";
    for (const auto& c : r.cases) {
      if (c.verdict == Outcome::Pass) continue;
      os << "  " << to_string(c.verdict) << " " << c.id << " residual " << c.residual << ": " << c.detail << "\n";
    }
    for (const auto& n : r.notes) os << "  note: " << n << "\n";
  }
  return os.str();
}

}  // namespace envcalc::suites
