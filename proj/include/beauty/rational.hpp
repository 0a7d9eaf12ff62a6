#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace beauty {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/*
 * Exact fraction: always reduced, denominator > 0, arbitrary precision.
 * Backed by boost::multiprecision::cpp_rational, which maintains the
 * canonical form; this wrapper adds the textual interface used across the
 * toolkit ("num/den" strings, fixed-point decimal rendering).
 */
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long long n) : v_(n) {}
  Rational(const BigInt& num, const BigInt& den);
  explicit Rational(BigRational v) : v_(std::move(v)) {}

  // Accepts "num/den" (optional sign on num, den a positive integer) or a
  // bare integer. Throws ProtocolError on anything else.
  static Rational parse(std::string_view text);

  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }
  const BigRational& value() const { return v_; }

  bool is_zero() const { return v_.is_zero(); }
  int sign() const { return v_.sign(); }
  double to_double() const { return v_.convert_to<double>(); }

  std::string str() const; // always "num/den"
  // Fixed-point decimal with `places` digits, round half away from zero.
  std::string decimal(int places = 12) const;

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(BigRational(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = a.v_.compare(b.v_);
    return c < 0 ? std::strong_ordering::less
         : c > 0 ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }

private:
  BigRational v_;
};

} // namespace beauty
