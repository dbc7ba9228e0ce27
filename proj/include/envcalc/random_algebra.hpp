#pragma once

#include "envcalc/algebra.hpp"
#include "envcalc/modules.hpp"
#include "envcalc/random_expr.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc::gen {

/// Seeded generators for elements of A and of its envelope.
class AlgebraGenerator {
 public:
  AlgebraGenerator(oracle::SplitMix64& rng, ProductModel model, Tier tier)
      : rng_(rng), model_(model), tier_(tier) {}

  [[nodiscard]] sym::Expr x_function(int depth = 2);
  [[nodiscard]] sym::Expr y_function(int depth = 2);
  [[nodiscard]] AElement aelement(std::size_t max_terms = 2, int max_depth = 2);
  /// Outer function in t1..tk that mentions every ti at least once.
  [[nodiscard]] sym::Expr outer(std::size_t k, int depth = 2);
  /// Random H o a whose flat has degree at most kMaxDegree and constants
  /// no larger than kMaxHeight.
  [[nodiscard]] EnvelopeElement envelope(std::size_t max_arity = 3);
  static constexpr int kMaxDegree = 6;
  static constexpr double kMaxHeight = 16;

  /// A structurally different pair (H', a') with the same flat, built from
  /// rewrites that split, pad, permute or rescale arguments.
  [[nodiscard]] EnvelopeElement alternative(const EnvelopeElement& e);

  /// A-element whose terms use only the given group.
  [[nodiscard]] AElement aelement_in(sym::Group g, std::size_t max_terms = 2);
  [[nodiscard]] AVector avector(std::size_t gens);
  [[nodiscard]] AVector avector_in(sym::Group g, std::size_t gens);

  /// Presentation with `relations` rows, row i having a nonzero constant in
  /// column i and random entries in the columns past the pivots. Its fiber
  /// dimension is gens - relations at every point. With `only`, entries use
  /// a single variable group.
  [[nodiscard]] AModule presentation(std::size_t gens, std::size_t relations,
                                     std::optional<sym::Group> only = std::nullopt);

  /// Denominators that are positive on all of R^(m+n) by construction.
  [[nodiscard]] EnvelopeElement positive_envelope();
  [[nodiscard]] AElement positive_aelement();

  [[nodiscard]] TensorElement tensor(std::size_t gens, std::size_t max_summands = 3);

  [[nodiscard]] oracle::SplitMix64& rng() { return rng_; }
  [[nodiscard]] const ProductModel& model() const { return model_; }
  [[nodiscard]] Tier tier() const { return tier_; }

 private:
  EnvelopeElement draw_envelope(std::size_t max_arity);
  std::vector<sym::VarId> group_vars(sym::Group g) const;

  oracle::SplitMix64& rng_;
  ProductModel model_;
  Tier tier_;
};

/// Polynomial when H and every argument are polynomial.
[[nodiscard]] Tier tier_of(const EnvelopeElement& e);

}  // namespace envcalc::gen
