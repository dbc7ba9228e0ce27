#include "envcalc/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace envcalc {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto dot = s.find('.');
  if (dot == std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal '" + s + "'");
    if (q.get_den() == 0) throw std::domain_error("rational with zero denominator");
    q.canonicalize();
    return Rational(q);
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  const auto frac_len = s.size() - dot - 1;
  if (digits.empty() || digits == "-") throw std::invalid_argument("bad decimal literal '" + s + "'");
  mpz_class num;
  if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad decimal literal '" + s + "'");
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  mpq_class q(num, den);
  q.canonicalize();
  return Rational(q);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  q_ /= o.q_;
  return *this;
}

Rational Rational::pow(long exponent) const {
  if (exponent == 0) return Rational(1);
  if (exponent < 0) {
    if (is_zero()) throw std::domain_error("zero raised to a negative power");
    return (Rational(1) / *this).pow(-exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Rational(mpq_class(num, den));
}

std::uint64_t Rational::hash() const {
  // FNV-1a over the decimal text keeps the value platform independent.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : q_.get_str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace envcalc
