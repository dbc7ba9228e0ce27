#pragma once

#include <map>
#include <optional>
#include <stdexcept>

#include "envcalc/modules.hpp"
#include "envcalc/sampling.hpp"

namespace envcalc {

/// Open box in M x N, one rational interval per coordinate. Coordinates
/// without an override use (-1, 1).
class Region {
 public:
  explicit Region(ProductModel model, std::map<sym::VarId, oracle::Interval> overrides = {});

  [[nodiscard]] const ProductModel& model() const { return model_; }
  [[nodiscard]] const oracle::Interval& interval(sym::VarId v) const;
  /// Sampling box for the equality oracle, shrunk slightly so that sample
  /// points stay inside the open box.
  [[nodiscard]] oracle::Box sampling_box() const;

 private:
  ProductModel model_;
  std::map<sym::VarId, oracle::Interval> box_;
};

/// Closed floating interval with outward rounding.
struct Enclosure {
  double lo;
  double hi;
  [[nodiscard]] bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
};

/// Interval extension of e over the given boxes. Empty when e is not
/// defined on the whole box (a divisor or log argument may reach zero).
[[nodiscard]] std::optional<Enclosure> enclose(const sym::Expr& e, const std::map<sym::VarId, Enclosure>& box);

/// True when e is certified nonzero on the region by interval evaluation
/// with dyadic bisection of the widest coordinate, at most `max_depth`
/// levels deep.
[[nodiscard]] bool certify_nonvanishing(const sym::Expr& e, const Region& u, int max_depth = 12);
/// Same for H o a, enclosing the arguments first and H on their ranges,
/// then falling back to the flat.
[[nodiscard]] bool certify_nonvanishing(const EnvelopeElement& e, const Region& u, int max_depth = 12);

/// Raised when a denominator cannot be certified nonzero on the region.
class UncertifiedDenominator : public std::runtime_error {
 public:
  explicit UncertifiedDenominator(const std::string& what)
      : std::runtime_error("cannot certify denominator " + what + " is nonzero on the region") {}
};

/// (sum f_i (x) p_i) / g with g an envelope scalar.
struct TensorFraction {
  TensorElement num;
  EnvelopeElement den;
};

struct ScalarFraction {
  EnvelopeElement num;
  EnvelopeElement den;
};

struct VectorFraction {
  AVector num;
  AElement den;
};

/// Element of (localized envelope) (x) (localized module), as a formal sum.
struct LocalTensor {
  struct Summand {
    ScalarFraction scalar;
    VectorFraction vector;
  };
  std::vector<Summand> summands;
};

/// Fractions over P with denominators nonvanishing on U.
class Localization {
 public:
  Localization(AModule p, Region u);

  [[nodiscard]] const AModule& module() const { return p_; }
  [[nodiscard]] const EnvModule& smoothened() const { return smooth_; }
  [[nodiscard]] const Region& region() const { return u_; }

  /// Throws UncertifiedDenominator.
  void certify(const sym::Expr& den) const;
  void certify(const EnvelopeElement& den) const;
  void certify(const AElement& den) const { certify(den.flatten()); }

  [[nodiscard]] TensorFraction fraction(TensorElement num, EnvelopeElement den) const;
  [[nodiscard]] LocalTensor local_tensor(std::vector<LocalTensor::Summand> summands) const;

  /// Cross-multiplied comparison in the smoothened module, sampling inside U.
  [[nodiscard]] sym::EqualityResult equal(const TensorFraction& a, const TensorFraction& b,
                                          const sym::OracleConfig& cfg) const;
  /// Compared through the common-denominator fraction of each side.
  [[nodiscard]] sym::EqualityResult equal(const LocalTensor& a, const LocalTensor& b,
                                          const sym::OracleConfig& cfg) const;

 private:
  AModule p_;
  EnvModule smooth_;
  Region u_;
};

[[nodiscard]] inline Localization localize(AModule p, Region u) { return Localization(std::move(p), std::move(u)); }

/// (f (x) p) / g -> (f / g) (x) (p / 1), summand by summand.
[[nodiscard]] LocalTensor split_fraction(const Localization& loc, const TensorFraction& fr);
/// (f / g) (x) (p / h) -> (f (x) p) / (g h). Several summands are brought
/// to the common denominator prod_i g_i h_i, or to g h itself when every
/// summand has the same g h.
[[nodiscard]] TensorFraction join_fractions(const Localization& loc, const LocalTensor& s);

}  // namespace envcalc
