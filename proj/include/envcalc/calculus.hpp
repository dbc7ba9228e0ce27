#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "envcalc/algebra.hpp"
#include "envcalc/equality.hpp"
#include "envcalc/modules.hpp"

namespace envcalc {

/// sum_c a_c d(coordinate c) with A coefficients, basis x1..xm, y1..yn.
struct OneFormA {
  std::vector<AElement> coeffs;
  friend bool operator==(const OneFormA&, const OneFormA&) = default;
};

/// One-form of the envelope, same basis.
struct OneFormEnv {
  std::vector<EnvelopeElement> coeffs;
};

/// Formal sum of scalar (x) form. Never collapsed implicitly; use
/// normalize_form to push the scalars in.
struct SmoothenedOneForm {
  struct Summand {
    EnvelopeElement scalar;
    OneFormA form;
  };
  std::vector<Summand> summands;
};

/// Derivation of A with values in the envelope, given by its values on the
/// coordinates. Only apply_derivation_A accepts it.
struct DerivationA {
  std::vector<EnvelopeElement> values;
};

/// Derivation of the envelope, given by the same data. Acts on every
/// envelope element through the chain rule.
struct DerivationEnv {
  std::vector<EnvelopeElement> values;
};

/// Error raised by point_cotangent_rank for a family member that is not
/// finite at the point.
class NonFiniteElement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

[[nodiscard]] OneFormA d_A(const ProductModel& model, const AElement& a);
/// d(H o a) = sum_i (dH/dti o a) da_i, one structural pair per coefficient:
/// (sum_i dH/dti * t_{k+i}) o (a, d_c a_1, ..., d_c a_k).
[[nodiscard]] OneFormEnv d_env(const ProductModel& model, const EnvelopeElement& e);
[[nodiscard]] OneFormEnv embed_form(const OneFormA& w);

/// phi(s (x) w) = s * w, with w expanded over the differentials of the
/// embedded coordinates.
[[nodiscard]] OneFormEnv phi(const ProductModel& model, const SmoothenedOneForm& s);
/// sum_c w_c (x) d(coordinate c).
[[nodiscard]] SmoothenedOneForm phi_inverse(const ProductModel& model, const OneFormEnv& w);
/// sum_i (dH/dti o a) (x) d_A(a_i): the preimage of d(H o a) read off the
/// chain rule.
[[nodiscard]] SmoothenedOneForm chain_preimage(const ProductModel& model, const EnvelopeElement& e);
/// Image in the free envelope module on the coordinate differentials.
[[nodiscard]] OneFormEnv normalize_form(const ProductModel& model, const SmoothenedOneForm& s);

[[nodiscard]] sym::EqualityResult equal_forms(const OneFormEnv& a, const OneFormEnv& b,
                                              const sym::OracleConfig& cfg);
[[nodiscard]] OneFormEnv zero_form(const ProductModel& model);

/// Contraction of d_A(a) with the values.
[[nodiscard]] EnvelopeElement apply_derivation_A(const ProductModel& model, const DerivationA& x,
                                                 const AElement& a);
/// sum_i (dH/dti o a) * X(a_i).
[[nodiscard]] EnvelopeElement apply_derivation_env(const ProductModel& model, const DerivationEnv& x,
                                                   const EnvelopeElement& e);
[[nodiscard]] DerivationA restrict_Pi(const DerivationEnv& x);
[[nodiscard]] DerivationEnv nabla(const DerivationA& x);
/// a * X, valuewise.
[[nodiscard]] DerivationA scale(const AElement& a, const DerivationA& x);
[[nodiscard]] DerivationA coordinate_derivation(const ProductModel& model, std::size_t c);

/// Rank of the gradients of the family at the point: the dimension of the
/// span of the classes of f - f(h) in the cotangent space at h.
[[nodiscard]] std::size_t point_cotangent_rank(const ProductModel& model, std::span<const EnvelopeElement> family,
                                               const sym::Valuation& point);
/// Rows of that matrix, one per family member.
[[nodiscard]] std::vector<std::vector<double>> gradient_rows(const ProductModel& model,
                                                             std::span<const EnvelopeElement> family,
                                                             const sym::Valuation& point);
/// The coordinate functions embedded in the envelope.
[[nodiscard]] std::vector<EnvelopeElement> coordinate_family(const ProductModel& model);

}  // namespace envcalc
