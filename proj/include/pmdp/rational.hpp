#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pmdp {

// Exact rational number, always kept in lowest terms with positive
// denominator. Thin wrapper over GMP's mpq_class so that parsing and
// canonical serialization rules live in one place: the textual form is
// "p" for integers and "p/q" otherwise, and decimal or exponent notation
// is rejected everywhere.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design
  Rational(long num, long den);
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  // Parses "p" or "p/q" (optional leading '-'). Throws ParseError on
  // anything else, including decimals like "0.5".
  static Rational from_string(const std::string& s);

  std::string str() const;

  const mpq_class& raw() const { return v_; }
  mpq_class& raw() { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  // Approximate double value, for logging and statistics only.
  double to_double() const { return v_.get_d(); }

private:
  mpq_class v_;
};

Rational abs(const Rational& a);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace pmdp
