#include "envcalc/calculus.hpp"

#include <cmath>
#include <sstream>

#include "envcalc/numeric.hpp"

namespace envcalc {

using sym::Expr;

namespace {

AElement coordinate_element(const ProductModel& model, std::size_t c) {
  const sym::VarId v = model.coordinate(c);
  return v.group == sym::Group::X ? AElement::from_x(sym::variable(v)) : AElement::from_y(sym::variable(v));
}

void require_dimension(const ProductModel& model, std::size_t size, const char* what) {
  if (size != model.dimension()) {
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(size) + " entries, expected " +
                                std::to_string(model.dimension()));
  }
}

std::string describe(const EnvelopeElement& e) {
  std::ostringstream os;
  os << e;
  return os.str();
}

}  // namespace

OneFormA d_A(const ProductModel& model, const AElement& a) {
  OneFormA out;
  for (const sym::VarId v : model.coordinates()) out.coeffs.push_back(a.partial(v));
  return out;
}

OneFormEnv d_env(const ProductModel& model, const EnvelopeElement& e) {
  const std::size_t k = e.arity();
  std::vector<Expr> dh;
  for (std::size_t i = 0; i < k; ++i) dh.push_back(sym::partial(e.outer(), sym::t(static_cast<std::uint32_t>(i + 1))));
  OneFormEnv out;
  for (const sym::VarId v : model.coordinates()) {
    std::vector<Expr> terms;
    std::vector<AElement> args = e.args();
    for (std::size_t i = 0; i < k; ++i) {
      terms.push_back(dh[i] * sym::variable(sym::t(static_cast<std::uint32_t>(k + i + 1))));
      args.push_back(e.args()[i].partial(v));
    }
    out.coeffs.emplace_back(sym::add(std::move(terms)), std::move(args));
  }
  return out;
}

OneFormEnv embed_form(const OneFormA& w) {
  OneFormEnv out;
  for (const auto& a : w.coeffs) out.coeffs.push_back(embed_A(a));
  return out;
}

OneFormEnv zero_form(const ProductModel& model) {
  return OneFormEnv{std::vector<EnvelopeElement>(model.dimension())};
}

OneFormEnv phi(const ProductModel& model, const SmoothenedOneForm& s) {
  const std::size_t n = model.dimension();
  std::vector<OneFormEnv> dx;
  for (std::size_t c = 0; c < n; ++c) dx.push_back(d_env(model, embed_A(coordinate_element(model, c))));
  std::vector<std::vector<EnvelopeElement>> parts(n);
  for (const auto& term : s.summands) {
    require_dimension(model, term.form.coeffs.size(), "one-form");
    for (std::size_t c = 0; c < n; ++c) {
      if (term.form.coeffs[c].is_zero()) continue;
      const EnvelopeElement scalar = env_mul(term.scalar, embed_A(term.form.coeffs[c]));
      for (std::size_t j = 0; j < n; ++j) {
        if (dx[c].coeffs[j].flat().is_zero()) continue;
        parts[j].push_back(env_mul(scalar, dx[c].coeffs[j]));
      }
    }
  }
  OneFormEnv out;
  for (auto& p : parts) out.coeffs.push_back(env_sum(p));
  return out;
}

SmoothenedOneForm phi_inverse(const ProductModel& model, const OneFormEnv& w) {
  require_dimension(model, w.coeffs.size(), "one-form");
  SmoothenedOneForm out;
  for (std::size_t c = 0; c < w.coeffs.size(); ++c) {
    if (w.coeffs[c].flat().is_zero()) continue;
    out.summands.push_back({w.coeffs[c], d_A(model, coordinate_element(model, c))});
  }
  return out;
}

SmoothenedOneForm chain_preimage(const ProductModel& model, const EnvelopeElement& e) {
  SmoothenedOneForm out;
  for (std::size_t i = 0; i < e.arity(); ++i) {
    const Expr dh = sym::partial(e.outer(), sym::t(static_cast<std::uint32_t>(i + 1)));
    if (dh.is_zero()) continue;
    out.summands.push_back({EnvelopeElement(dh, e.args()), d_A(model, e.args()[i])});
  }
  return out;
}

OneFormEnv normalize_form(const ProductModel& model, const SmoothenedOneForm& s) {
  TensorElement t;
  for (const auto& term : s.summands) {
    require_dimension(model, term.form.coeffs.size(), "one-form");
    t.summands.push_back({term.scalar, AVector{term.form.coeffs}});
  }
  return OneFormEnv{tensor_normalize(t, model.dimension()).coeffs};
}

sym::EqualityResult equal_forms(const OneFormEnv& a, const OneFormEnv& b, const sym::OracleConfig& cfg) {
  if (a.coeffs.size() != b.coeffs.size()) throw std::invalid_argument("one-forms of different length");
  std::vector<sym::EqualityResult> parts;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) parts.push_back(same_function(a.coeffs[i], b.coeffs[i], cfg));
  return sym::combine(parts);
}

EnvelopeElement apply_derivation_A(const ProductModel& model, const DerivationA& x, const AElement& a) {
  require_dimension(model, x.values.size(), "derivation");
  const OneFormA da = d_A(model, a);
  std::vector<EnvelopeElement> parts;
  for (std::size_t c = 0; c < da.coeffs.size(); ++c) {
    if (da.coeffs[c].is_zero()) continue;
    parts.push_back(env_mul(embed_A(da.coeffs[c]), x.values[c]));
  }
  return env_sum(parts);
}

EnvelopeElement apply_derivation_env(const ProductModel& model, const DerivationEnv& x, const EnvelopeElement& e) {
  require_dimension(model, x.values.size(), "derivation");
  const DerivationA on_a = restrict_Pi(x);
  std::vector<EnvelopeElement> parts;
  for (std::size_t i = 0; i < e.arity(); ++i) {
    const Expr dh = sym::partial(e.outer(), sym::t(static_cast<std::uint32_t>(i + 1)));
    if (dh.is_zero()) continue;
    parts.push_back(env_mul(EnvelopeElement(dh, e.args()), apply_derivation_A(model, on_a, e.args()[i])));
  }
  return env_sum(parts);
}

DerivationA restrict_Pi(const DerivationEnv& x) { return DerivationA{x.values}; }

DerivationEnv nabla(const DerivationA& x) { return DerivationEnv{x.values}; }

DerivationA scale(const AElement& a, const DerivationA& x) {
  DerivationA out;
  for (const auto& v : x.values) out.values.push_back(env_mul(embed_A(a), v));
  return out;
}

DerivationA coordinate_derivation(const ProductModel& model, std::size_t c) {
  DerivationA out{std::vector<EnvelopeElement>(model.dimension())};
  out.values.at(c) = EnvelopeElement::constant(Rational(1));
  return out;
}

std::vector<std::vector<double>> gradient_rows(const ProductModel& model, std::span<const EnvelopeElement> family,
                                               const sym::Valuation& point) {
  std::vector<std::vector<double>> rows;
  for (const auto& f : family) {
    if (!std::isfinite(f.evaluate(point))) throw NonFiniteElement("family member " + describe(f) + " is not finite at the point");
    std::vector<double> row;
    for (const auto& c : d_env(model, f).coeffs) {
      row.push_back(c.evaluate(point));
      if (!std::isfinite(row.back())) {
        throw NonFiniteElement("differential of family member " + describe(f) + " is not finite at the point");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t point_cotangent_rank(const ProductModel& model, std::span<const EnvelopeElement> family,
                                 const sym::Valuation& point) {
  auto rows = gradient_rows(model, family, point);
  if (rows.empty()) return 0;
  return oracle::rank_at(std::move(rows));
}

std::vector<EnvelopeElement> coordinate_family(const ProductModel& model) {
  std::vector<EnvelopeElement> out;
  for (std::size_t c = 0; c < model.dimension(); ++c) out.push_back(embed_A(coordinate_element(model, c)));
  return out;
}

}  // namespace envcalc
