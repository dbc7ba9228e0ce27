#include "envcalc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "envcalc/eval.hpp"

namespace envcalc {

using sym::Expr;
using sym::Kind;
using sym::VarId;

namespace {

bool in_model(const ProductModel& m, VarId v) {
  if (v.group == sym::Group::X) return v.index >= 1 && v.index <= m.m();
  if (v.group == sym::Group::Y) return v.index >= 1 && v.index <= m.n();
  return false;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double v) { return std::nextafter(v, -kInf); }
double up(double v) { return std::nextafter(v, kInf); }

// libm transcendentals are not correctly rounded; widen by a few ulps.
Enclosure widen(double lo, double hi) { return {down(down(lo)), up(up(hi))}; }

Enclosure mul(Enclosure a, Enclosure b) {
  const double c[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = c[0], hi = c[0];
  for (double v : c) {
    if (std::isnan(v)) return {-kInf, kInf};
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {down(lo), up(hi)};
}

Enclosure pow_positive(Enclosure a, int n) {
  if (n % 2 == 0 && a.contains_zero()) {
    return {0.0, up(std::max(std::pow(a.lo, n), std::pow(a.hi, n)))};
  }
  const double l = std::pow(a.lo, n), h = std::pow(a.hi, n);
  return widen(std::min(l, h), std::max(l, h));
}

// True when [lo, hi] contains c + 2 pi k for some integer k.
bool hits(double lo, double hi, double c) {
  constexpr double two_pi = 2 * std::numbers::pi;
  const double k = std::ceil((lo - c) / two_pi - 1e-12);
  return c + two_pi * k <= hi + 1e-12;
}

Enclosure sin_enclosure(Enclosure a) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.hi - a.lo >= 2 * std::numbers::pi) return {-1, 1};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  if (hits(a.lo, a.hi, std::numbers::pi / 2)) hi = 1;
  if (hits(a.lo, a.hi, -std::numbers::pi / 2)) lo = -1;
  return widen(lo, hi);
}

Enclosure cos_enclosure(Enclosure a) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.hi - a.lo >= 2 * std::numbers::pi) return {-1, 1};
  double lo = std::min(std::cos(a.lo), std::cos(a.hi));
  double hi = std::max(std::cos(a.lo), std::cos(a.hi));
  if (hits(a.lo, a.hi, 0.0)) hi = 1;
  if (hits(a.lo, a.hi, std::numbers::pi)) lo = -1;
  return widen(lo, hi);
}

Enclosure exact(const Rational& r) {
  const double v = r.to_double();
  return {down(v), up(v)};
}

using Encloser = std::function<std::optional<Enclosure>(const std::map<VarId, Enclosure>&)>;

bool certify_box(const Encloser& enc_fn, const std::vector<VarId>& vars, std::map<VarId, Enclosure>& box,
                 int depth) {
  const auto enc = enc_fn(box);
  if (enc && !enc->contains_zero()) return true;
  if (depth == 0 || vars.empty()) return false;
  VarId widest = vars.front();
  for (VarId v : vars) {
    if (box.at(v).hi - box.at(v).lo > box.at(widest).hi - box.at(widest).lo) widest = v;
  }
  const Enclosure whole = box.at(widest);
  const double mid = whole.lo + (whole.hi - whole.lo) / 2;
  box[widest] = {whole.lo, mid};
  bool ok = certify_box(enc_fn, vars, box, depth - 1);
  if (ok) {
    box[widest] = {mid, whole.hi};
    ok = certify_box(enc_fn, vars, box, depth - 1);
  }
  box[widest] = whole;
  return ok;
}

std::map<VarId, Enclosure> initial_box(const std::vector<VarId>& vars, const Region& u) {
  std::map<VarId, Enclosure> box;
  for (VarId v : vars) {
    if (!in_model(u.model(), v)) throw std::invalid_argument("denominator uses " + v.name() + " outside the model");
    const auto& iv = u.interval(v);
    box[v] = {exact(iv.lo).lo, exact(iv.hi).hi};
  }
  return box;
}

}  // namespace

Region::Region(ProductModel model, std::map<VarId, oracle::Interval> overrides) : model_(model) {
  for (VarId v : model_.coordinates()) box_[v] = oracle::Interval{Rational(-1), Rational(1)};
  for (const auto& [v, iv] : overrides) {
    if (!in_model(model_, v)) throw std::invalid_argument("region coordinate " + v.name() + " is not in the model");
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("region interval for " + v.name() + " is empty");
    box_[v] = iv;
  }
}

const oracle::Interval& Region::interval(VarId v) const {
  const auto it = box_.find(v);
  if (it == box_.end()) throw std::invalid_argument("region has no coordinate " + v.name());
  return it->second;
}

oracle::Box Region::sampling_box() const {
  oracle::Box out;
  for (const auto& [v, iv] : box_) {
    const Rational margin = (iv.hi - iv.lo) * Rational(1, 1024);
    out.overrides[v] = {iv.lo + margin, iv.hi - margin};
  }
  return out;
}

std::optional<Enclosure> enclose(const Expr& e, const std::map<VarId, Enclosure>& box) {
  switch (e.kind()) {
    case Kind::Const:
      return exact(e.value());
    case Kind::Var: {
      const auto it = box.find(e.var());
      if (it == box.end()) throw sym::UnboundVariable(e.var());
      return it->second;
    }
    case Kind::Add: {
      Enclosure acc{0.0, 0.0};
      for (const Expr& c : e.children()) {
        const auto v = enclose(c, box);
        if (!v) return std::nullopt;
        acc = {down(acc.lo + v->lo), up(acc.hi + v->hi)};
      }
      return acc;
    }
    case Kind::Mul: {
      Enclosure acc{1.0, 1.0};
      for (const Expr& c : e.children()) {
        const auto v = enclose(c, box);
        if (!v) return std::nullopt;
        acc = mul(acc, *v);
      }
      return acc;
    }
    case Kind::Pow: {
      const auto b = enclose(e.arg(), box);
      if (!b) return std::nullopt;
      const int n = e.exponent();
      if (n >= 0) return n == 0 ? Enclosure{1.0, 1.0} : pow_positive(*b, n);
      const Enclosure p = pow_positive(*b, -n);
      if (p.contains_zero()) return std::nullopt;
      return Enclosure{down(1.0 / p.hi), up(1.0 / p.lo)};
    }
    case Kind::Exp: {
      const auto a = enclose(e.arg(), box);
      if (!a) return std::nullopt;
      return widen(std::exp(a->lo), std::exp(a->hi));
    }
    case Kind::Log: {
      const auto a = enclose(e.arg(), box);
      if (!a || a->lo <= 0.0) return std::nullopt;
      return widen(std::log(a->lo), std::log(a->hi));
    }
    case Kind::Sin: {
      const auto a = enclose(e.arg(), box);
      if (!a) return std::nullopt;
      return sin_enclosure(*a);
    }
    case Kind::Cos: {
      const auto a = enclose(e.arg(), box);
      if (!a) return std::nullopt;
      return cos_enclosure(*a);
    }
  }
  return std::nullopt;
}

bool certify_nonvanishing(const Expr& e, const Region& u, int max_depth) {
  const std::vector<VarId> vars(e.vars().begin(), e.vars().end());
  auto box = initial_box(vars, u);
  return certify_box([&e](const auto& b) { return enclose(e, b); }, vars, box, max_depth);
}

namespace {

bool defined_on(const Expr& e, const Region& u, int max_depth);

// A defined function without zeros on the connected box keeps the sign it has
// at the centre.
bool certify_positive(const Expr& e, const Region& u, int max_depth) {
  if (!defined_on(e, u, max_depth) || !certify_nonvanishing(e, u, max_depth)) return false;
  sym::Valuation centre;
  for (VarId v : e.vars()) {
    const auto& iv = u.interval(v);
    centre.set(v, ((iv.lo + iv.hi) / Rational(2)).to_double());
  }
  return sym::eval(e, centre) > 0;
}

// Every reciprocal inside e has a base certified nonzero on u and every
// logarithm a certified positive argument; then e is finite on u even where
// its enclosure is too loose.
bool defined_on(const Expr& e, const Region& u, int max_depth) {
  if (e.kind() == Kind::Log) return certify_positive(e.arg(), u, max_depth);
  if (e.kind() == Kind::Pow && e.exponent() < 0 && !certify_nonvanishing(e.arg(), u, max_depth)) return false;
  for (const Expr& c : e.children()) {
    if (!defined_on(c, u, max_depth)) return false;
  }
  return true;
}

// Defined for every real value of its variables.
bool entire(const Expr& e) {
  if (e.kind() == Kind::Log || (e.kind() == Kind::Pow && e.exponent() < 0)) return false;
  for (const Expr& c : e.children()) {
    if (!entire(c)) return false;
  }
  return true;
}

// Zero-free for every real value of its variables.
bool never_zero(const Expr& e) {
  switch (e.kind()) {
    case Kind::Const: return !e.value().is_zero();
    case Kind::Exp: return entire(e.arg());
    case Kind::Pow: return never_zero(e.arg());
    case Kind::Mul:
      return std::all_of(e.children().begin(), e.children().end(), [](const Expr& c) { return never_zero(c); });
    default: return false;
  }
}

}  // namespace

bool certify_nonvanishing(const EnvelopeElement& e, const Region& u, int max_depth) {
  std::vector<sym::Expr> flats;
  for (const auto& a : e.args()) flats.push_back(a.flatten());
  const std::vector<VarId> vars = oracle::collect_vars(flats);
  auto box = initial_box(vars, u);
  std::vector<std::optional<bool>> finite(flats.size());
  if (never_zero(e.outer())) {
    bool all_defined = true;
    for (std::size_t i = 0; i < flats.size() && all_defined; ++i) {
      if (enclose(flats[i], box)) continue;
      finite[i] = defined_on(flats[i], u, max_depth);
      all_defined = *finite[i];
    }
    if (all_defined) return true;
  }
  // Enclose the arguments first and the outer function on their ranges. An
  // argument known to be finite but not enclosable ranges over the whole line.
  auto composed = [&](const std::map<VarId, Enclosure>& b) -> std::optional<Enclosure> {
    std::map<VarId, Enclosure> ts;
    for (std::size_t i = 0; i < flats.size(); ++i) {
      auto a = enclose(flats[i], b);
      if (!a) {
        if (!finite[i]) finite[i] = defined_on(flats[i], u, max_depth);
        if (!*finite[i]) return std::nullopt;
        a = Enclosure{-kInf, kInf};
      }
      ts[sym::t(static_cast<std::uint32_t>(i + 1))] = *a;
    }
    return enclose(e.outer(), ts);
  };
  return certify_box(composed, vars, box, max_depth) || certify_nonvanishing(e.flat(), u, max_depth);
}

// --- localization -------------------------------------------------------------

Localization::Localization(AModule p, Region u) : p_(std::move(p)), smooth_(smoothen(p_)), u_(std::move(u)) {}

void Localization::certify(const Expr& den) const {
  if (!certify_nonvanishing(den, u_)) throw UncertifiedDenominator(sym::to_string(den));
}

void Localization::certify(const EnvelopeElement& den) const {
  if (!certify_nonvanishing(den, u_)) throw UncertifiedDenominator(sym::to_string(den.flat()));
}

TensorFraction Localization::fraction(TensorElement num, EnvelopeElement den) const {
  for (const auto& s : num.summands) p_.check(s.vector);
  certify(den);
  return {std::move(num), std::move(den)};
}

LocalTensor Localization::local_tensor(std::vector<LocalTensor::Summand> summands) const {
  for (const auto& s : summands) {
    p_.check(s.vector.num);
    certify(s.scalar.den);
    certify(s.vector.den);
  }
  return {std::move(summands)};
}

sym::EqualityResult Localization::equal(const TensorFraction& a, const TensorFraction& b,
                                        const sym::OracleConfig& cfg) const {
  const EnvVector lhs = scale(b.den, tensor_normalize(a.num, p_.gens()));
  const EnvVector rhs = scale(a.den, tensor_normalize(b.num, p_.gens()));
  sym::OracleConfig inside = cfg;
  inside.domain = u_.sampling_box();
  return equal_mod(smooth_, lhs, rhs, inside);
}

sym::EqualityResult Localization::equal(const LocalTensor& a, const LocalTensor& b,
                                        const sym::OracleConfig& cfg) const {
  return equal(join_fractions(*this, a), join_fractions(*this, b), cfg);
}

LocalTensor split_fraction(const Localization& loc, const TensorFraction& fr) {
  // g is already certified; 1 needs no certificate.
  for (const auto& s : fr.num.summands) loc.module().check(s.vector);
  LocalTensor out;
  for (const auto& s : fr.num.summands) {
    out.summands.push_back({ScalarFraction{s.scalar, fr.den}, VectorFraction{s.vector, AElement::constant(Rational(1))}});
  }
  return out;
}

TensorFraction join_fractions(const Localization& loc, const LocalTensor& s) {
  std::vector<EnvelopeElement> dens;
  for (const auto& term : s.summands) loc.module().check(term.vector.num);
  for (const auto& term : s.summands) dens.push_back(env_mul(term.scalar.den, embed_A(term.vector.den)));
  // Each g_i and h_i was certified when s was formed, so their product needs
  // no new certificate.
  if (dens.size() == 1) return {TensorElement{{{s.summands[0].scalar.num, s.summands[0].vector.num}}}, dens[0]};
  if (!dens.empty() && std::all_of(dens.begin(), dens.end(), [&](const auto& d) { return d == dens[0]; })) {
    TensorElement num;
    for (const auto& term : s.summands) num.summands.push_back({term.scalar.num, term.vector.num});
    return {std::move(num), dens[0]};
  }
  TensorElement num;
  EnvelopeElement common = EnvelopeElement::constant(Rational(1));
  for (std::size_t i = 0; i < dens.size(); ++i) {
    EnvelopeElement scalar = s.summands[i].scalar.num;
    for (std::size_t j = 0; j < dens.size(); ++j) {
      if (j != i) scalar = env_mul(scalar, dens[j]);
    }
    num.summands.push_back({scalar, s.summands[i].vector.num});
    common = i == 0 ? dens[0] : env_mul(common, dens[i]);
  }
  return {std::move(num), common};
}

}  // namespace envcalc
