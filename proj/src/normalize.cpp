// Canonical forms for smooth expressions.
//
// A normalized expression is a finite sum of monomials c * prod(atom^k) with
// rational c. Atoms are variables, exp/log/sin/cos of normalized arguments,
// and inverses of normalized sums (kept as Pow(sum, k) with k < 0; positive
// powers of sums are always expanded). Within a monomial at most one exp atom
// survives: exp(a)^j * exp(b)^k is merged into exp(j*a + k*b).

#include <algorithm>
#include <map>
#include <set>

#include "envcalc/expr.hpp"
#include "expr_node.hpp"

namespace envcalc::sym {
namespace {

using Monomial = std::vector<std::pair<Expr, int>>;

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [a, k] : m) d += k;
  return d;
}

/// Graded lexicographic comparison; atoms earlier in ExprLess order rank
/// higher (x1 > x2 > y1 > ...).
bool mono_greater(const Monomial& a, const Monomial& b) {
  const int da = degree(a);
  const int db = degree(b);
  if (da != db) return da > db;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].first, b[j].first) < 0)) {
      return a[i].second > 0;
    }
    if (i == a.size() || compare(b[j].first, a[i].first) < 0) {
      return b[j].second < 0;
    }
    if (a[i].second != b[j].second) return a[i].second > b[j].second;
    ++i;
    ++j;
  }
  return false;
}

struct MonoOrder {
  bool operator()(const Monomial& a, const Monomial& b) const { return mono_greater(a, b); }
};

using Poly = std::map<Monomial, Rational, MonoOrder>;

Poly to_poly(const Expr& e);
Expr from_poly(const Poly& p);
Poly cancel(Poly p);

void add_term(Poly& p, Monomial m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = p.try_emplace(std::move(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
  }
}

Poly constant_poly(const Rational& c) {
  Poly p;
  add_term(p, {}, c);
  return p;
}

Poly atom_poly(const Expr& atom, int k = 1) {
  Poly p;
  p.emplace(Monomial{{atom, k}}, Rational(1));
  return p;
}

Monomial merge(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].first, b[j].first) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(b[j].first, a[i].first) < 0) {
      out.push_back(b[j++]);
    } else {
      const int k = a[i].second + b[j].second;
      if (k != 0) out.emplace_back(a[i].first, k);
      ++i;
      ++j;
    }
  }
  return out;
}

bool needs_fixup(const Monomial& m) {
  int exps = 0;
  for (const auto& [a, k] : m) {
    if (a.kind() == Kind::Exp) {
      if (k != 1) return true;
      ++exps;
    } else if (a.kind() == Kind::Add && k > 0) {
      return true;
    }
  }
  return exps > 1;
}

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_pow(const Poly& p, int n);

Expr canonical_exp(const Expr& arg) { return Builder::node(Kind::Exp, {arg}, 0, true); }

/// Rewrites a monomial violating the atom invariants into a polynomial.
Poly fixup(const Monomial& m) {
  Monomial rest;
  std::vector<Expr> exp_args;
  std::vector<std::pair<Expr, int>> sums;
  for (const auto& [a, k] : m) {
    if (a.kind() == Kind::Exp) {
      exp_args.push_back(mul({Expr(Rational(k)), a.arg()}));
    } else if (a.kind() == Kind::Add && k > 0) {
      sums.emplace_back(a, k);
    } else {
      rest.emplace_back(a, k);
    }
  }
  Poly out;
  out.emplace(std::move(rest), Rational(1));
  if (!exp_args.empty()) {
    const Expr combined = normalize(add(std::move(exp_args)));
    if (!combined.is_zero()) out = poly_mul(out, atom_poly(canonical_exp(combined)));
  }
  for (const auto& [s, k] : sums) out = poly_mul(out, poly_pow(to_poly(s), k));
  return out;
}

void accumulate_product(Poly& out, const Monomial& a, const Monomial& b, const Rational& c) {
  Monomial m = merge(a, b);
  if (!needs_fixup(m)) {
    add_term(out, std::move(m), c);
    return;
  }
  for (const auto& [fm, fc] : fixup(m)) add_term(out, fm, c * fc);
}

Poly poly_add(Poly a, const Poly& b, const Rational& scale = Rational(1)) {
  for (const auto& [m, c] : b) add_term(a, m, c * scale);
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) accumulate_product(out, ma, mb, ca * cb);
  }
  return out;
}

Poly poly_pow(const Poly& p, int n) {
  Poly result = constant_poly(Rational(1));
  Poly base = p;
  while (n > 0) {
    if (n & 1) result = poly_mul(result, base);
    n >>= 1;
    if (n > 0) base = poly_mul(base, base);
  }
  return result;
}

Poly poly_scale(const Poly& p, const Rational& s) {
  Poly out;
  for (const auto& [m, c] : p) add_term(out, m, c * s);
  return out;
}

Poly poly_inverse(const Poly& raw) {
  Poly p = cancel(raw);
  if (p.empty()) return atom_poly(Builder::constant(Rational(0), true), -1);
  if (p.size() == 1) {
    const auto& [m, c] = *p.begin();
    Monomial inv;
    inv.reserve(m.size());
    for (const auto& [a, k] : m) inv.emplace_back(a, -k);
    Poly out;
    accumulate_product(out, inv, {}, Rational(1) / c);
    return out;
  }
  const Rational lc = p.begin()->second;
  const Expr sum = from_poly(poly_scale(p, Rational(1) / lc));
  Poly out;
  out.emplace(Monomial{{sum, -1}}, Rational(1) / lc);
  return out;
}

/// Exponents of `d` divide those of `m` when each atom of `d` occurs in `m`
/// with the same sign and at least the same magnitude.
bool divides(const Monomial& d, const Monomial& m) {
  std::size_t j = 0;
  for (const auto& [a, k] : d) {
    while (j < m.size() && compare(m[j].first, a) < 0) ++j;
    if (j == m.size() || !(m[j].first == a)) return false;
    const int km = m[j].second;
    if ((k > 0) != (km > 0) || std::abs(k) > std::abs(km)) return false;
  }
  return true;
}

Monomial quotient(const Monomial& m, const Monomial& d) {
  Monomial inv;
  for (const auto& [a, k] : d) inv.emplace_back(a, -k);
  return merge(m, inv);
}

struct Division {
  Poly quotient;
  Poly remainder;
  bool complete = false;
};

Division divide(const Poly& num, const Poly& den) {
  Division out;
  Poly cur = num;
  const auto& [lm, lc] = *den.begin();
  const std::size_t cap = 8 * (num.size() + den.size()) + 32;
  std::size_t steps = 0;
  while (!cur.empty()) {
    if (++steps > cap) return out;
    auto it = cur.begin();
    if (divides(lm, it->first)) {
      const Monomial q = quotient(it->first, lm);
      const Rational qc = it->second / lc;
      add_term(out.quotient, q, qc);
      for (const auto& [dm, dc] : den) accumulate_product(cur, dm, q, -(dc * qc));
    } else {
      add_term(out.remainder, it->first, it->second);
      cur.erase(it);
    }
  }
  out.complete = true;
  return out;
}

/// Cancels sums against their own inverses where exact division succeeds and
/// shortens the expression, e.g. (x + y)/(x + y) -> 1.
Poly cancel(Poly p) {
  for (int round = 0; round < 64; ++round) {
    std::set<Expr, ExprLess> atoms;
    for (const auto& [m, c] : p) {
      for (const auto& [a, k] : m) {
        if (a.kind() == Kind::Add && k < 0) atoms.insert(a);
      }
    }
    bool changed = false;
    for (const Expr& s : atoms) {
      std::map<int, Poly> groups;
      Poly rest;
      for (const auto& [m, c] : p) {
        int k = 0;
        Monomial without;
        for (const auto& [a, e] : m) {
          if (a == s) {
            k = e;
          } else {
            without.emplace_back(a, e);
          }
        }
        if (k < 0) {
          add_term(groups[k], std::move(without), c);
        } else {
          add_term(rest, m, c);
        }
      }
      const Poly sp = to_poly(s);
      for (const auto& [k, q] : groups) {
        const Division div = divide(q, sp);
        const bool shorter = div.complete && !div.quotient.empty() &&
                             div.quotient.size() + div.remainder.size() < q.size();
        const Monomial s_k{{s, k}};
        if (shorter) {
          const Monomial s_k1 = (k + 1 == 0) ? Monomial{} : Monomial{{s, k + 1}};
          for (const auto& [m, c] : div.quotient) accumulate_product(rest, m, s_k1, c);
          for (const auto& [m, c] : div.remainder) accumulate_product(rest, m, s_k, c);
          changed = true;
        } else {
          for (const auto& [m, c] : q) accumulate_product(rest, m, s_k, c);
        }
      }
      p = std::move(rest);
      if (changed) break;
    }
    if (!changed) return p;
  }
  return p;
}

Expr negate_canonical(const Expr& e) { return from_poly(poly_scale(to_poly(e), Rational(-1))); }

Poly function_poly(Kind k, const Expr& raw_arg) {
  const Expr a = normalize(raw_arg);
  switch (k) {
    case Kind::Exp:
      if (a.is_zero()) return constant_poly(Rational(1));
      return atom_poly(canonical_exp(a));
    case Kind::Log:
      if (a.is_one()) return {};
      if (a.kind() == Kind::Exp) return to_poly(a.arg());
      return atom_poly(Builder::node(Kind::Log, {a}, 0, true));
    case Kind::Sin:
      if (a.is_zero()) return {};
      if (leading_sign(a) < 0) {
        return poly_scale(atom_poly(Builder::node(Kind::Sin, {negate_canonical(a)}, 0, true)),
                          Rational(-1));
      }
      return atom_poly(Builder::node(Kind::Sin, {a}, 0, true));
    case Kind::Cos:
      if (a.is_zero()) return constant_poly(Rational(1));
      if (leading_sign(a) < 0) {
        return atom_poly(Builder::node(Kind::Cos, {negate_canonical(a)}, 0, true));
      }
      return atom_poly(Builder::node(Kind::Cos, {a}, 0, true));
    default:
      return {};
  }
}

Poly to_poly(const Expr& e) {
  switch (e.kind()) {
    case Kind::Const:
      return constant_poly(e.value());
    case Kind::Var:
      return atom_poly(e);
    case Kind::Add: {
      Poly out;
      for (const auto& c : e.children()) out = poly_add(std::move(out), to_poly(c));
      return out;
    }
    case Kind::Mul: {
      Poly out = constant_poly(Rational(1));
      for (const auto& c : e.children()) {
        out = poly_mul(out, to_poly(c));
        if (out.empty()) break;
      }
      return out;
    }
    case Kind::Pow: {
      const Expr& base = e.children()[0];
      const int n = e.exponent();
      if (n >= 0) return poly_pow(to_poly(base), n);
      return poly_pow(poly_inverse(to_poly(base)), -n);
    }
    default:
      return function_poly(e.kind(), e.arg());
  }
}

Expr from_poly(const Poly& p) {
  if (p.empty()) return Builder::constant(Rational(0), true);
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p) {
    if (m.empty()) {
      terms.push_back(Builder::constant(c, true));
      continue;
    }
    std::vector<Expr> factors;
    if (!c.is_one()) factors.push_back(Builder::constant(c, true));
    for (const auto& [a, k] : m) {
      factors.push_back(k == 1 ? a : Builder::node(Kind::Pow, {a}, k, true));
    }
    terms.push_back(factors.size() == 1 ? factors.front()
                                        : Builder::node(Kind::Mul, std::move(factors), 0, true));
  }
  if (terms.size() == 1) return terms.front();
  return Builder::node(Kind::Add, std::move(terms), 0, true);
}

Expr differentiate(const Expr& e, VarId v) {
  if (!e.depends_on(v)) return Expr();
  switch (e.kind()) {
    case Kind::Const:
      return Expr();
    case Kind::Var:
      return Expr(1);
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& c : e.children()) terms.push_back(differentiate(c, v));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      const auto f = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].depends_on(v)) continue;
        std::vector<Expr> factors(f.begin(), f.end());
        factors[i] = differentiate(f[i], v);
        terms.push_back(mul(std::move(factors)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      const Expr& b = e.children()[0];
      const int n = e.exponent();
      return mul({Expr(Rational(n)), pow(b, n - 1), differentiate(b, v)});
    }
    case Kind::Exp:
      return mul({e, differentiate(e.arg(), v)});
    case Kind::Log:
      return mul({differentiate(e.arg(), v), pow(e.arg(), -1)});
    case Kind::Sin:
      return mul({cos(e.arg()), differentiate(e.arg(), v)});
    case Kind::Cos:
      return mul({Expr(-1), sin(e.arg()), differentiate(e.arg(), v)});
  }
  return Expr();
}

}  // namespace

Expr normalize(const Expr& e) {
  if (e.is_canonical()) return e;
  return from_poly(cancel(to_poly(e)));
}

Expr partial(const Expr& e, VarId v) { return normalize(differentiate(e, v)); }

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(VarId)>& f) {
  switch (e.kind()) {
    case Kind::Const:
      return e;
    case Kind::Var: {
      auto r = f(e.var());
      return r ? *r : e;
    }
    case Kind::Add:
    case Kind::Mul: {
      std::vector<Expr> c;
      c.reserve(e.children().size());
      for (const auto& ch : e.children()) c.push_back(substitute(ch, f));
      return e.kind() == Kind::Add ? add(std::move(c)) : mul(std::move(c));
    }
    case Kind::Pow:
      return Builder::node(Kind::Pow, {substitute(e.children()[0], f)}, e.exponent());
    default:
      return apply_function(e.kind(), substitute(e.arg(), f));
  }
}

Expr rename(const Expr& e, const std::function<VarId(VarId)>& f) {
  return substitute(e, [&f](VarId v) -> std::optional<Expr> { return variable(f(v)); });
}

std::uint32_t max_t_index(const Expr& e) {
  std::uint32_t k = 0;
  for (VarId v : e.vars()) {
    if (v.group == Group::T) k = std::max(k, v.index);
  }
  return k;
}

int leading_sign(const Expr& e) {
  switch (e.kind()) {
    case Kind::Const:
      return e.value().sign();
    case Kind::Mul:
      return e.children()[0].is_const() ? e.children()[0].value().sign() : 1;
    case Kind::Add:
      return leading_sign(e.children()[0]);
    default:
      return 1;
  }
}

bool is_polynomial(const Expr& e) {
  switch (e.kind()) {
    case Kind::Const:
    case Kind::Var:
      return true;
    case Kind::Add:
    case Kind::Mul:
      return std::all_of(e.children().begin(), e.children().end(), is_polynomial);
    case Kind::Pow:
      return e.exponent() >= 0 && is_polynomial(e.children()[0]);
    default:
      return false;
  }
}

}  // namespace envcalc::sym
