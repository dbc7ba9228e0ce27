#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "envcalc/algebra.hpp"
#include "envcalc/equality.hpp"

namespace envcalc {

inline const sym::Expr& flat_of(const AElement& a) { return a.flatten(); }
inline const sym::Expr& flat_of(const EnvelopeElement& e) { return e.flat(); }

/// Coefficient vector over the generators of a finitely presented module.
template <class Scalar>
struct ModuleElement {
  std::vector<Scalar> coeffs;

  friend bool operator==(const ModuleElement&, const ModuleElement&) = default;
};

/// Module given by p generators and a list of relation vectors. Scalar is
/// AElement (modules over A) or EnvelopeElement (modules over the envelope).
template <class Scalar>
class FinPresModule {
 public:
  FinPresModule(std::size_t gens, std::vector<std::vector<Scalar>> relations)
      : gens_(gens), relations_(std::move(relations)) {
    for (const auto& r : relations_) {
      if (r.size() != gens_) {
        throw std::invalid_argument("relation has " + std::to_string(r.size()) + " entries, expected " +
                                    std::to_string(gens_));
      }
      bool zero = true;
      for (const auto& s : r) zero = zero && flat_of(s).is_zero();
      if (zero) throw std::invalid_argument("zero relation");
    }
  }

  static FinPresModule free(std::size_t rank) { return FinPresModule(rank, {}); }

  [[nodiscard]] std::size_t gens() const { return gens_; }
  [[nodiscard]] const std::vector<std::vector<Scalar>>& relations() const { return relations_; }
  [[nodiscard]] bool is_free() const { return relations_.empty(); }

  void check(const ModuleElement<Scalar>& v) const {
    if (v.coeffs.size() != gens_) {
      throw std::invalid_argument("module element has " + std::to_string(v.coeffs.size()) +
                                  " coefficients, expected " + std::to_string(gens_));
    }
  }

 private:
  std::size_t gens_;
  std::vector<std::vector<Scalar>> relations_;
};

using AModule = FinPresModule<AElement>;
using EnvModule = FinPresModule<EnvelopeElement>;
using AVector = ModuleElement<AElement>;
using EnvVector = ModuleElement<EnvelopeElement>;

/// Formal sum of scalar (x) vector over A, not yet normalized.
struct TensorElement {
  struct Summand {
    EnvelopeElement scalar;
    AVector vector;
  };
  std::vector<Summand> summands;
};

/// Relations passed entrywise through embed_A.
[[nodiscard]] EnvModule smoothen(const AModule& p);
/// Base change on coefficient vectors.
[[nodiscard]] EnvVector base_change(const AVector& v);
/// Pushes each scalar into the coefficients: sum_i s_i * embed(p_i).
[[nodiscard]] EnvVector tensor_normalize(const TensorElement& t, std::size_t gens);

[[nodiscard]] AVector scale(const AElement& a, const AVector& v);
[[nodiscard]] EnvVector scale(const EnvelopeElement& a, const EnvVector& v);
[[nodiscard]] EnvVector add(const EnvVector& a, const EnvVector& b);

/// Equality modulo relations over flats. Relations with constant pivots are
/// eliminated symbolically; if a difference survives, sampled points decide
/// whether it leaves the pointwise relation span (NotEqual) or not
/// (Undetermined).
[[nodiscard]] sym::EqualityResult equal_mod_flats(const std::vector<std::vector<sym::Expr>>& relations,
                                                  const std::vector<sym::Expr>& a,
                                                  const std::vector<sym::Expr>& b,
                                                  const sym::OracleConfig& cfg);

template <class Scalar>
std::vector<sym::Expr> flats(const std::vector<Scalar>& v) {
  std::vector<sym::Expr> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(flat_of(s));
  return out;
}

template <class Scalar>
sym::EqualityResult equal_mod(const FinPresModule<Scalar>& p, const ModuleElement<Scalar>& a,
                              const ModuleElement<Scalar>& b, const sym::OracleConfig& cfg) {
  p.check(a);
  p.check(b);
  std::vector<std::vector<sym::Expr>> rels;
  for (const auto& r : p.relations()) rels.push_back(flats(r));
  return equal_mod_flats(rels, flats(a.coeffs), flats(b.coeffs), cfg);
}

/// Dimension of the fiber at a point: generators minus the rank of the
/// evaluated relation matrix.
template <class Scalar>
std::size_t fiber_dimension(const FinPresModule<Scalar>& p, const sym::Valuation& at);

/// P over C(M) (x only) and Q over C(N) (y only) give the smoothening of
/// P (x)_R Q. Generator (i, j) has index i * Q.gens() + j.
[[nodiscard]] EnvModule smoothened_tensor(const AModule& p, const AModule& q);

// --- product isomorphism ------------------------------------------------------
//
// Source: C(MxN) (x)_A (C(M) (x) Q), summands H (x) (f (x) q).
// Target: C(MxN) (x)_{C(N)} Q, summands H (x) q.
// Q is a module over C(N): its relations and the coordinates of q use y only.

struct ProductSource {
  struct Summand {
    EnvelopeElement scalar;
    sym::Expr f;  // x only
    AVector q;
  };
  std::vector<Summand> summands;
};

struct ProductTarget {
  struct Summand {
    EnvelopeElement scalar;
    AVector q;
  };
  std::vector<Summand> summands;
};

/// H (x) (f (x) q) -> (H f) (x) q
[[nodiscard]] ProductTarget product_forward(const ProductSource& s);
/// H (x) q -> H (x) (1 (x) q)
[[nodiscard]] ProductSource product_backward(const ProductTarget& t);
[[nodiscard]] ProductSource scale(const EnvelopeElement& a, const ProductSource& s);
[[nodiscard]] ProductTarget scale(const EnvelopeElement& a, const ProductTarget& t);

/// Images in the smoothening of Q, where both sides are compared.
[[nodiscard]] EnvVector normalize_source(const ProductSource& s, std::size_t gens);
[[nodiscard]] EnvVector normalize_target(const ProductTarget& t, std::size_t gens);

/// The x <-> y mirror of the pair above: P (x)_R C(N) against
/// P (x)_{C(M)} C(MxN), with f using y and P using x.
[[nodiscard]] ProductTarget product_forward_mirrored(const ProductSource& s);
[[nodiscard]] ProductSource product_backward_mirrored(const ProductTarget& t);

[[nodiscard]] ProductSource mirror(const ProductSource& s);
[[nodiscard]] ProductTarget mirror(const ProductTarget& t);
[[nodiscard]] AModule mirror(const AModule& p);

/// Throws GroupError unless every entry of every relation uses only g.
void require_group(const AModule& p, sym::Group g, const char* what);

}  // namespace envcalc
