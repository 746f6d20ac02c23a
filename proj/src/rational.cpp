#include "pmdp/rational.hpp"

#include <ostream>

#include "pmdp/errors.hpp"

namespace pmdp {

Rational::Rational(long num, long den) : v_(num, den) {
  if (den == 0) throw DomainError("DivisionByZero", "rational with zero denominator");
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("DivisionByZero", "division by zero");
  v_ /= o.v_;
  return *this;
}

namespace {

bool valid_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

Rational Rational::from_string(const std::string& s) {
  std::size_t slash = s.find('/');
  std::string num = (slash == std::string::npos) ? s : s.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "" : s.substr(slash + 1);
  if (!valid_integer_token(num) || (slash != std::string::npos && !valid_integer_token(den))) {
    throw ParseError("not a rational literal (want \"p\" or \"p/q\"): \"" + s + "\"");
  }
  if (slash != std::string::npos && den[0] == '-') {
    throw ParseError("denominator must be positive in \"" + s + "\"");
  }
  mpq_class v;
  if (v.set_str(s, 10) != 0) {
    throw ParseError("not a rational literal: \"" + s + "\"");
  }
  if (slash != std::string::npos && mpz_class(den) == 0) {
    throw ParseError("zero denominator in \"" + s + "\"");
  }
  v.canonicalize();
  return Rational(v);
}

std::string Rational::str() const { return v_.get_str(); }

Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace pmdp
