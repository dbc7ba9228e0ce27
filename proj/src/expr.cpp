#include "envcalc/expr.hpp"

#include <algorithm>
#include <sstream>

#include "expr_node.hpp"

namespace envcalc::sym {

std::string VarId::name() const {
  static constexpr char kLetters[] = {'x', 'y', 't'};
  return std::string(1, kLetters[static_cast<int>(group)]) + std::to_string(index);
}

bool is_function(Kind k) {
  return k == Kind::Exp || k == Kind::Log || k == Kind::Sin || k == Kind::Cos;
}

const char* function_name(Kind k) {
  switch (k) {
    case Kind::Exp: return "exp";
    case Kind::Log: return "log";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    default: return "?";
  }
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::vector<VarId> merge_vars(const std::vector<Expr>& children) {
  std::vector<VarId> out;
  for (const auto& c : children) out.insert(out.end(), c.vars().begin(), c.vars().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Expr Builder::make(Node n) {
  std::uint64_t h = static_cast<std::uint64_t>(n.kind) * 0x100000001b3ULL;
  switch (n.kind) {
    case Kind::Const:
      h = mix(h, n.value.hash());
      break;
    case Kind::Var:
      h = mix(h, (static_cast<std::uint64_t>(n.var.group) << 32) | n.var.index);
      n.vars = {n.var};
      break;
    default:
      if (n.kind == Kind::Pow) h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.exponent)));
      for (const auto& c : n.children) h = mix(h, c.hash());
      n.vars = merge_vars(n.children);
      break;
  }
  n.hash = h;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Builder::constant(const Rational& r, bool canonical) {
  Node n;
  n.kind = Kind::Const;
  n.value = r;
  n.canonical = canonical;
  return make(std::move(n));
}

Expr Builder::node(Kind k, std::vector<Expr> children, int exponent, bool canonical) {
  Node n;
  n.kind = k;
  n.children = std::move(children);
  n.exponent = exponent;
  n.canonical = canonical;
  return make(std::move(n));
}

Expr::Expr() : Expr(Builder::constant(Rational(0), true)) {}
Expr::Expr(const Rational& value) : Expr(Builder::constant(value, true)) {}

Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
VarId Expr::var() const { return node_->var; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::span<const VarId> Expr::vars() const { return node_->vars; }
std::uint64_t Expr::hash() const { return node_->hash; }
bool Expr::is_canonical() const { return node_->canonical; }

bool Expr::depends_on(VarId v) const {
  return std::binary_search(node_->vars.begin(), node_->vars.end(), v);
}

bool Expr::only_group(Group g) const {
  return std::all_of(node_->vars.begin(), node_->vars.end(),
                     [g](VarId v) { return v.group == g; });
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.kind() != b.kind()) return a.kind() <=> b.kind();
  switch (a.kind()) {
    case Kind::Const: return a.value() <=> b.value();
    case Kind::Var: return a.var() <=> b.var();
    case Kind::Pow:
      if (auto c = compare(a.children()[0], b.children()[0]); c != 0) return c;
      return a.exponent() <=> b.exponent();
    default: {
      const auto ca = a.children();
      const auto cb = b.children();
      const auto n = std::min(ca.size(), cb.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (auto c = compare(ca[i], cb[i]); c != 0) return c;
      }
      return ca.size() <=> cb.size();
    }
  }
}

Expr variable(VarId v) {
  Node n;
  n.kind = Kind::Var;
  n.var = v;
  n.canonical = true;
  return Builder::make(std::move(n));
}

Expr add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t.kind() == Kind::Add) {
      flat.insert(flat.end(), t.children().begin(), t.children().end());
    } else if (!t.is_zero()) {
      flat.push_back(std::move(t));
    }
  }
  if (flat.empty()) return Expr();
  if (flat.size() == 1) return flat.front();
  return Builder::node(Kind::Add, std::move(flat));
}

Expr mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f.kind() == Kind::Mul) {
      flat.insert(flat.end(), f.children().begin(), f.children().end());
    } else if (!f.is_one()) {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return Expr(1);
  if (flat.size() == 1) return flat.front();
  return Builder::node(Kind::Mul, std::move(flat));
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 1) return base;
  if (exponent == 0) return Expr(1);
  return Builder::node(Kind::Pow, {base}, exponent);
}

Expr neg(const Expr& e) {
  if (e.is_const()) return Expr(-e.value());
  if (e.kind() == Kind::Mul && e.children()[0].is_const()) {
    std::vector<Expr> f(e.children().begin(), e.children().end());
    f[0] = Expr(-f[0].value());
    return mul(std::move(f));
  }
  return mul({Expr(-1), e});
}

Expr apply_function(Kind k, const Expr& e) { return Builder::node(k, {e}); }
Expr exp(const Expr& e) { return apply_function(Kind::Exp, e); }
Expr log(const Expr& e) { return apply_function(Kind::Log, e); }
Expr sin(const Expr& e) { return apply_function(Kind::Sin, e); }
Expr cos(const Expr& e) { return apply_function(Kind::Cos, e); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, -1)}); }
Expr operator-(const Expr& a) { return neg(a); }

// --- printing --------------------------------------------------------------

namespace {

bool is_plain_const(const Expr& e) {
  return e.is_const() && e.value().is_integer() && e.value().sign() >= 0;
}

bool is_simple(const Expr& e) {
  return e.kind() == Kind::Var || is_function(e.kind()) || is_plain_const(e);
}

void print(std::ostream& os, const Expr& e);

void print_wrapped(std::ostream& os, const Expr& e, bool wrap) {
  if (wrap) os << '(';
  print(os, e);
  if (wrap) os << ')';
}

void print_mul(std::ostream& os, std::span<const Expr> factors) {
  bool first = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Expr& f = factors[i];
    if (first) {
      first = false;
      if (f.is_const() && f.value() == Rational(-1) && factors.size() > 1) {
        os << '-';
        first = true;
        // The next factor prints as a leading factor of the negation.
        const Expr& g = factors[++i];
        print_wrapped(os, g, g.kind() == Kind::Add || (g.is_const() && !is_plain_const(g)));
        first = false;
        continue;
      }
      print_wrapped(os, f, f.kind() == Kind::Add);
      continue;
    }
    if (f.kind() == Kind::Pow && f.exponent() == -1) {
      os << '/';
      print_wrapped(os, f.children()[0], !is_simple(f.children()[0]));
    } else {
      os << '*';
      print_wrapped(os, f, f.kind() == Kind::Add || (f.is_const() && !is_plain_const(f)));
    }
  }
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Kind::Const:
      os << e.value().str();
      return;
    case Kind::Var:
      os << e.var().name();
      return;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sin:
    case Kind::Cos:
      os << function_name(e.kind()) << '(';
      print(os, e.arg());
      os << ')';
      return;
    case Kind::Pow:
      print_wrapped(os, e.children()[0], !is_simple(e.children()[0]));
      os << '^' << e.exponent();
      return;
    case Kind::Mul:
      print_mul(os, e.children());
      return;
    case Kind::Add: {
      bool first = true;
      for (const auto& c : e.children()) {
        if (first) {
          print(os, c);
          first = false;
          continue;
        }
        const bool negative = (c.is_const() && c.value().sign() < 0) ||
                              (c.kind() == Kind::Mul && c.children()[0].is_const() &&
                               c.children()[0].value().sign() < 0);
        if (negative) {
          os << " - ";
          const Expr n = neg(c);
          print_wrapped(os, n, n.kind() == Kind::Add);
        } else {
          os << " + ";
          print(os, c);
        }
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
  print(os, e);
  return os;
}

}  // namespace envcalc::sym
