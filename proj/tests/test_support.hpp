#pragma once

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "envcalc/algebra.hpp"
#include "envcalc/random_expr.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc::gen {

inline void PrintTo(Tier t, std::ostream* os) { *os << to_string(t); }

}  // namespace envcalc::gen

namespace envcalc::testing_support {

inline std::string tier_name(const ::testing::TestParamInfo<gen::Tier>& info) { return gen::to_string(info.param); }

/// Evaluates H o a by computing each argument at p first and then H at the
/// resulting t values. Never touches the cached flat.
inline double eval_pair(const EnvelopeElement& e, const sym::Valuation& p) {
  sym::Valuation t = p;
  for (std::size_t i = 0; i < e.arity(); ++i) {
    t.set(sym::t(static_cast<std::uint32_t>(i + 1)), sym::eval(e.args()[i].flatten(), p));
  }
  return sym::eval(e.outer(), t);
}

/// Evaluates an A-element term by term.
inline double eval_terms(const AElement& a, const sym::Valuation& p) {
  double s = 0;
  for (const auto& term : a.terms()) s += sym::eval(term.f, p) * sym::eval(term.g, p);
  return s;
}

/// Central difference of the composed pair along v, evaluated through eval_pair.
inline double pair_fd(const EnvelopeElement& e, sym::VarId v, const sym::Valuation& p, double h = 1e-4) {
  sym::Valuation plus = p, minus = p;
  plus.set(v, p.get(v) + h);
  minus.set(v, p.get(v) - h);
  return (eval_pair(e, plus) - eval_pair(e, minus)) / (2 * h);
}

inline double scaled_gap(double a, double b) {
  return std::abs(a - b) / (1 + std::max(std::abs(a), std::abs(b)));
}

inline oracle::SampleStream points(std::uint64_t seed, const ProductModel& model) {
  return oracle::SampleStream(seed, {}, model.coordinates());
}

}  // namespace envcalc::testing_support
