#include "envcalc/random_algebra.hpp"

#include <cmath>
#include <cstdlib>

#include "envcalc/eval.hpp"

namespace envcalc::gen {

using sym::Expr;
using sym::VarId;

std::vector<VarId> AlgebraGenerator::group_vars(sym::Group g) const {
  std::vector<VarId> out;
  const auto count = g == sym::Group::X ? model_.m() : model_.n();
  for (std::uint32_t i = 1; i <= count; ++i) out.push_back({g, i});
  return out;
}

Expr AlgebraGenerator::x_function(int depth) {
  ExprGenerator g(rng_, group_vars(sym::Group::X), tier_);
  return g(depth);
}

Expr AlgebraGenerator::y_function(int depth) {
  ExprGenerator g(rng_, group_vars(sym::Group::Y), tier_);
  return g(depth);
}

AElement AlgebraGenerator::aelement(std::size_t max_terms, int max_depth) {
  const auto terms = 1 + rng_.below(max_terms);
  std::vector<AElement::Term> out;
  for (std::uint64_t i = 0; i < terms; ++i) {
    const Expr f = x_function(static_cast<int>(rng_.between(0, max_depth)));
    const Expr g = y_function(static_cast<int>(rng_.between(0, max_depth)));
    out.push_back({f, g});
  }
  AElement a(std::move(out));
  // Keep arguments non-constant so the envelope structure is exercised.
  if (a.flatten().vars().empty()) a = a + AElement::product(sym::variable(sym::x(1)), sym::variable(sym::y(1)));
  return a;
}

Expr AlgebraGenerator::outer(std::size_t k, int depth) {
  std::vector<VarId> ts;
  for (std::uint32_t i = 1; i <= k; ++i) ts.push_back(sym::t(i));
  ExprGenerator g(rng_, ts, tier_);
  Expr h = g(depth);
  // Mention every t so each argument matters.
  for (VarId v : ts) {
    if (!sym::normalize(h).depends_on(v)) {
      const Expr c(g.small_rational());
      h = h + c * sym::variable(v);
    }
  }
  return h;
}

namespace {

// Rough degree of a normal form; kernels count as their argument.
int degree(const Expr& e) {
  switch (e.kind()) {
    case sym::Kind::Const: return 0;
    case sym::Kind::Var: return 1;
    case sym::Kind::Pow: return std::abs(e.exponent()) * degree(e.arg());
    case sym::Kind::Mul: {
      int d = 0;
      for (const Expr& c : e.children()) d += degree(c);
      return d;
    }
    case sym::Kind::Add: {
      int d = 0;
      for (const Expr& c : e.children()) d = std::max(d, degree(c));
      return d;
    }
    default: return degree(e.arg());
  }
}

// Largest closed subterm, by absolute value, appearing anywhere in e.
double height(const Expr& e) {
  if (e.vars().empty()) return std::abs(sym::eval(e, sym::Valuation{}));
  double h = 0;
  if (e.kind() != sym::Kind::Var) {
    for (const Expr& c : e.children()) h = std::max(h, height(c));
  }
  return h;
}

}  // namespace

EnvelopeElement AlgebraGenerator::envelope(std::size_t max_arity) {
  // Central differences at the default step resolve a relative error of
  // 1e-6 only while third derivatives stay moderate, so composites of high
  // degree or with large coefficients are redrawn.
  for (int attempt = 0;; ++attempt) {
    EnvelopeElement e = draw_envelope(max_arity);
    if ((degree(e.flat()) <= kMaxDegree && height(e.flat()) <= kMaxHeight) || attempt == 100) return e;
  }
}

EnvelopeElement AlgebraGenerator::draw_envelope(std::size_t max_arity) {
  // Outer and argument depths share a budget so the composite stays about
  // as deep as the expressions of the symbolic layer.
  const auto k = 1 + rng_.below(max_arity);
  const int outer_depth = static_cast<int>(rng_.between(1, 2));
  std::vector<AElement> args;
  for (std::uint64_t i = 0; i < k; ++i) args.push_back(aelement(2, 3 - outer_depth));
  const Expr h = outer(k, outer_depth);
  return EnvelopeElement(h, std::move(args));
}

EnvelopeElement AlgebraGenerator::alternative(const EnvelopeElement& e) {
  const std::size_t k = e.arity();
  const auto pick = static_cast<std::uint32_t>(1 + rng_.below(k == 0 ? 1 : k));
  auto subst = [](const Expr& h, VarId target, const Expr& by) {
    return sym::substitute(h, [&](VarId v) -> std::optional<Expr> {
      if (v == target) return by;
      return std::nullopt;
    });
  };
  const Expr t_new = sym::variable(sym::t(static_cast<std::uint32_t>(k + 1)));
  std::vector<AElement> args = e.args();

  switch (k == 0 ? 4 : rng_.below(5)) {
    case 0: {
      // Split an argument a_i = b + c into two slots.
      const AElement& a = args[pick - 1];
      if (a.terms().size() >= 2) {
        AElement b({a.terms().front()});
        AElement c(std::vector<AElement::Term>(a.terms().begin() + 1, a.terms().end()));
        args[pick - 1] = b;
        args.push_back(c);
        const Expr ti = sym::variable(sym::t(pick));
        return EnvelopeElement(subst(e.outer(), sym::t(pick), ti + t_new), std::move(args));
      }
      [[fallthrough]];
    }
    case 1: {
      // t_i -> t_i * t_{k+1} with a_{k+1} = 1.
      args.push_back(AElement::constant(Rational(1)));
      const Expr ti = sym::variable(sym::t(pick));
      return EnvelopeElement(subst(e.outer(), sym::t(pick), ti * t_new), std::move(args));
    }
    case 2: {
      if (k >= 2) {
        // Reverse the argument order.
        std::vector<AElement> rev(args.rbegin(), args.rend());
        const Expr h = sym::rename(e.outer(), [k](VarId v) {
          return VarId{v.group, static_cast<std::uint32_t>(k + 1 - v.index)};
        });
        EnvelopeElement reversed(h, std::move(rev));
        if (!(reversed == e)) return reversed;
      }
      [[fallthrough]];
    }
    case 3: {
      // t_i -> 2 t_i with a_i -> a_i / 2.
      args[pick - 1] = Rational(1, 2) * args[pick - 1];
      const Expr ti = sym::variable(sym::t(pick));
      return EnvelopeElement(subst(e.outer(), sym::t(pick), Expr(2) * ti), std::move(args));
    }
    default: {
      // H + t_{k+1} - t_{k+2} with both new slots holding the same element.
      const AElement extra = aelement(1);
      args.push_back(extra);
      args.push_back(extra);
      const Expr t_next = sym::variable(sym::t(static_cast<std::uint32_t>(k + 2)));
      return EnvelopeElement(e.outer() + t_new - t_next, std::move(args));
    }
  }
}

AElement AlgebraGenerator::aelement_in(sym::Group g, std::size_t max_terms) {
  const auto terms = 1 + rng_.below(max_terms);
  std::vector<AElement::Term> out;
  ExprGenerator eg(rng_, group_vars(g), tier_);
  for (std::uint64_t i = 0; i < terms; ++i) {
    const Expr f = eg(static_cast<int>(rng_.between(0, 2)));
    if (g == sym::Group::X) {
      out.push_back({f, Expr(1)});
    } else {
      out.push_back({Expr(1), f});
    }
  }
  return AElement(std::move(out));
}

AVector AlgebraGenerator::avector(std::size_t gens) {
  AVector v;
  for (std::size_t j = 0; j < gens; ++j) v.coeffs.push_back(rng_.chance(20) ? AElement() : aelement());
  return v;
}

AVector AlgebraGenerator::avector_in(sym::Group g, std::size_t gens) {
  AVector v;
  for (std::size_t j = 0; j < gens; ++j) v.coeffs.push_back(rng_.chance(20) ? AElement() : aelement_in(g));
  return v;
}

AModule AlgebraGenerator::presentation(std::size_t gens, std::size_t relations, std::optional<sym::Group> only) {
  if (relations > gens) throw std::invalid_argument("more pivots than generators");
  std::vector<std::vector<AElement>> rows;
  for (std::size_t i = 0; i < relations; ++i) {
    std::vector<AElement> row(gens);
    const auto c = rng_.between(1, 3) * (rng_.chance(50) ? 1 : -1);
    row[i] = AElement::constant(Rational(static_cast<long>(c)));
    for (std::size_t j = relations; j < gens; ++j) {
      if (rng_.chance(25)) continue;
      row[j] = only ? aelement_in(*only) : aelement();
    }
    rows.push_back(std::move(row));
  }
  return AModule(gens, std::move(rows));
}

EnvelopeElement AlgebraGenerator::positive_envelope() {
  const Expr t1 = sym::variable(sym::t(1));
  const Expr t2 = sym::variable(sym::t(2));
  switch (rng_.below(4)) {
    case 0: return EnvelopeElement(sym::exp(t1), {aelement()});
    case 1: return EnvelopeElement(Expr(2) + sym::sin(t1), {aelement()});
    case 2: return EnvelopeElement(Expr(1) + sym::pow(t1, 2), {aelement()});
    default: {
      const AElement a = aelement();
      const AElement b = aelement();
      return EnvelopeElement(Expr(3) + sym::cos(t1) * sym::sin(t2), {a, b});
    }
  }
}

AElement AlgebraGenerator::positive_aelement() {
  // c + cos(f(x)) * sin(g(y)) with c >= 2.
  const Expr f = x_function(1);
  const Expr g = y_function(1);
  const auto c = rng_.between(2, 4);
  return AElement({{Expr(Rational(static_cast<long>(c))), Expr(1)}, {sym::cos(f), sym::sin(g)}});
}

TensorElement AlgebraGenerator::tensor(std::size_t gens, std::size_t max_summands) {
  TensorElement t;
  const auto k = 1 + rng_.below(max_summands);
  for (std::uint64_t i = 0; i < k; ++i) {
    EnvelopeElement s = envelope(2);
    AVector v = avector(gens);
    t.summands.push_back({std::move(s), std::move(v)});
  }
  return t;
}

Tier tier_of(const EnvelopeElement& e) {
  if (!sym::is_polynomial(e.outer())) return Tier::Transcendental;
  for (const auto& a : e.args()) {
    if (!sym::is_polynomial(a.flatten())) return Tier::Transcendental;
  }
  return Tier::Polynomial;
}

}  // namespace envcalc::gen
