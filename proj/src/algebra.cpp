#include "envcalc/algebra.hpp"

#include <algorithm>

namespace envcalc {

using sym::Expr;
using sym::Group;
using sym::VarId;

ProductModel::ProductModel(std::uint32_t m, std::uint32_t n) : m_(m), n_(n) {
  if (m < 1 || n < 1) throw std::invalid_argument("product model needs m >= 1 and n >= 1");
}

std::vector<VarId> ProductModel::coordinates() const {
  std::vector<VarId> out;
  for (std::uint32_t i = 1; i <= m_; ++i) out.push_back(sym::x(i));
  for (std::uint32_t j = 1; j <= n_; ++j) out.push_back(sym::y(j));
  return out;
}

VarId ProductModel::coordinate(std::size_t i) const {
  if (i >= dimension()) throw std::out_of_range("coordinate index out of range");
  return i < m_ ? sym::x(static_cast<std::uint32_t>(i + 1))
                : sym::y(static_cast<std::uint32_t>(i - m_ + 1));
}

// --- AElement ----------------------------------------------------------------

AElement::AElement(std::vector<Term> terms) {
  std::vector<Expr> products;
  for (auto& t : terms) {
    if (!t.f.only_group(Group::X)) {
      throw GroupError("left factor of an A-element must only use x variables: " + sym::to_string(t.f));
    }
    if (!t.g.only_group(Group::Y)) {
      throw GroupError("right factor of an A-element must only use y variables: " + sym::to_string(t.g));
    }
    Term n{sym::normalize(t.f), sym::normalize(t.g)};
    if (n.f.is_zero() || n.g.is_zero()) continue;
    products.push_back(n.f * n.g);
    terms_.push_back(std::move(n));
  }
  flat_ = sym::normalize(sym::add(std::move(products)));
}

AElement AElement::constant(const Rational& r) { return AElement({{Expr(r), Expr(1)}}); }
AElement AElement::from_x(const Expr& f) { return AElement({{f, Expr(1)}}); }
AElement AElement::from_y(const Expr& g) { return AElement({{Expr(1), g}}); }
AElement AElement::product(const Expr& f, const Expr& g) { return AElement({{f, g}}); }

std::optional<AElement> AElement::try_from_expr(const Expr& e) {
  const Expr n = sym::normalize(e);
  if (!std::all_of(n.vars().begin(), n.vars().end(), [](VarId v) { return v.group != Group::T; })) {
    return std::nullopt;
  }
  std::vector<Expr> monomials;
  if (n.kind() == sym::Kind::Add) {
    monomials.assign(n.children().begin(), n.children().end());
  } else {
    monomials.push_back(n);
  }
  std::vector<Term> terms;
  for (const Expr& mono : monomials) {
    std::vector<Expr> factors;
    if (mono.kind() == sym::Kind::Mul) {
      factors.assign(mono.children().begin(), mono.children().end());
    } else {
      factors.push_back(mono);
    }
    std::vector<Expr> fx, gy;
    for (const Expr& f : factors) {
      if (f.only_group(Group::X)) {
        fx.push_back(f);
      } else if (f.only_group(Group::Y)) {
        gy.push_back(f);
      } else {
        return std::nullopt;
      }
    }
    terms.push_back({sym::mul(std::move(fx)), sym::mul(std::move(gy))});
  }
  return AElement(std::move(terms));
}

AElement AElement::partial(VarId v) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (v.group == Group::X) {
      out.push_back({sym::partial(t.f, v), t.g});
    } else if (v.group == Group::Y) {
      out.push_back({t.f, sym::partial(t.g, v)});
    }
  }
  return AElement(std::move(out));
}

AElement operator+(const AElement& a, const AElement& b) {
  std::vector<AElement::Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return AElement(std::move(t));
}

AElement operator-(const AElement& a) {
  std::vector<AElement::Term> t;
  for (const auto& term : a.terms_) t.push_back({sym::neg(term.f), term.g});
  return AElement(std::move(t));
}

AElement operator-(const AElement& a, const AElement& b) { return a + (-b); }

AElement operator*(const AElement& a, const AElement& b) {
  std::vector<AElement::Term> t;
  t.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& p : a.terms_) {
    for (const auto& q : b.terms_) t.push_back({p.f * q.f, p.g * q.g});
  }
  return AElement(std::move(t));
}

AElement operator*(const Rational& r, const AElement& a) {
  std::vector<AElement::Term> t;
  for (const auto& term : a.terms_) t.push_back({Expr(r) * term.f, term.g});
  return AElement(std::move(t));
}

bool operator==(const AElement& a, const AElement& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].f == b.terms_[i].f) || !(a.terms_[i].g == b.terms_[i].g)) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const AElement& a) {
  if (a.terms().empty()) return os << "0";
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) os << " + ";
    first = false;
    os << '(' << t.f << ")*(" << t.g << ')';
  }
  return os;
}

// --- EnvelopeElement ------------------------------------------------------------

EnvelopeElement::EnvelopeElement() : outer_(Expr()), flat_(Expr()) {}

EnvelopeElement::EnvelopeElement(Expr outer, std::vector<AElement> args)
    : outer_(sym::normalize(outer)), args_(std::move(args)) {
  if (!outer_.only_group(Group::T)) {
    throw GroupError("outer function must only use t variables: " + sym::to_string(outer_));
  }
  if (sym::max_t_index(outer_) > args_.size()) {
    throw std::invalid_argument("outer function uses t" + std::to_string(sym::max_t_index(outer_)) +
                                " but only " + std::to_string(args_.size()) + " arguments given");
  }
  flat_ = flatten(*this);
}

EnvelopeElement EnvelopeElement::constant(const Rational& r) { return EnvelopeElement(Expr(r), {}); }

bool operator==(const EnvelopeElement& a, const EnvelopeElement& b) {
  return a.outer_ == b.outer_ && a.args_ == b.args_;
}

std::ostream& operator<<(std::ostream& os, const EnvelopeElement& e) {
  os << e.outer() << " @ [";
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    if (i) os << ", ";
    os << e.args()[i].flatten();
  }
  return os << ']';
}

Expr flatten(const EnvelopeElement& e) {
  const auto& args = e.args();
  return sym::normalize(sym::substitute(e.outer(), [&args](VarId v) -> std::optional<Expr> {
    if (v.group != Group::T) return std::nullopt;
    return args.at(v.index - 1).flatten();
  }));
}

EnvelopeElement env_scalar_mul(const Rational& r, const EnvelopeElement& e) {
  return EnvelopeElement(Expr(r) * e.outer(), e.args());
}

namespace {

Expr shift_outer(const Expr& h, std::size_t offset) {
  return sym::rename(h, [offset](VarId v) {
    return VarId{v.group, v.index + static_cast<std::uint32_t>(offset)};
  });
}

std::vector<AElement> concat(const std::vector<AElement>& a, const std::vector<AElement>& b) {
  std::vector<AElement> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

EnvelopeElement env_add(const EnvelopeElement& e, const EnvelopeElement& f) {
  return EnvelopeElement(e.outer() + shift_outer(f.outer(), e.arity()), concat(e.args(), f.args()));
}

EnvelopeElement env_mul(const EnvelopeElement& e, const EnvelopeElement& f) {
  return EnvelopeElement(e.outer() * shift_outer(f.outer(), e.arity()), concat(e.args(), f.args()));
}

EnvelopeElement env_neg(const EnvelopeElement& e) { return env_scalar_mul(Rational(-1), e); }

EnvelopeElement env_sub(const EnvelopeElement& e, const EnvelopeElement& f) {
  return env_add(e, env_neg(f));
}

EnvelopeElement embed_A(const AElement& a) {
  return EnvelopeElement(sym::variable(sym::t(1)), {a});
}

sym::EqualityResult same_function(const EnvelopeElement& a, const EnvelopeElement& b,
                                  const sym::OracleConfig& cfg) {
  return sym::equal(a.flat(), b.flat(), cfg);
}

EnvelopeElement env_sum(const std::vector<EnvelopeElement>& terms) {
  if (terms.empty()) return EnvelopeElement();
  EnvelopeElement acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = env_add(acc, terms[i]);
  return acc;
}

// --- mirroring ------------------------------------------------------------------

VarId mirror(VarId v) {
  if (v.group == Group::X) return {Group::Y, v.index};
  if (v.group == Group::Y) return {Group::X, v.index};
  return v;
}

Expr mirror(const Expr& e) { return sym::rename(e, [](VarId v) { return mirror(v); }); }

AElement mirror(const AElement& a) {
  std::vector<AElement::Term> t;
  for (const auto& term : a.terms()) t.push_back({mirror(term.g), mirror(term.f)});
  return AElement(std::move(t));
}

EnvelopeElement mirror(const EnvelopeElement& e) {
  std::vector<AElement> args;
  for (const auto& a : e.args()) args.push_back(mirror(a));
  return EnvelopeElement(e.outer(), std::move(args));
}

}  // namespace envcalc
