#include "beauty/rational.hpp"

#include "beauty/errors.hpp"

#include <cctype>
#include <stdexcept>

namespace beauty {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

} // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den.is_zero()) throw std::domain_error("rational with zero denominator");
  // cpp_rational requires a positive denominator, so move the sign up front.
  if (den < 0)
    v_ = BigRational(BigInt(-num), BigInt(-den));
  else
    v_ = BigRational(num, den);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(std::string_view text) {
  std::string_view num = text;
  std::string_view den = "1";
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  bool negative = false;
  if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
    negative = num.front() == '-';
    num.remove_prefix(1);
  }
  if (!all_digits(num) || !all_digits(den))
    throw ProtocolError("malformed rational '" + std::string(text) + "'");
  BigInt n{std::string(num)};
  BigInt d{std::string(den)};
  if (d.is_zero())
    throw ProtocolError("malformed rational '" + std::string(text) + "': zero denominator");
  if (negative) n = -n;
  return Rational(n, d);
}

std::string Rational::str() const {
  return numerator().str() + "/" + denominator().str();
}

std::string Rational::decimal(int places) const {
  if (places < 0) throw std::invalid_argument("decimal places must be >= 0");
  const bool negative = sign() < 0;
  const BigInt mag = boost::multiprecision::abs(numerator());
  const BigInt den = denominator();
  BigInt ip = mag / den;
  const BigInt rem = mag % den;
  BigInt pow10 = 1;
  for (int i = 0; i < places; ++i) pow10 *= 10;
  BigInt frac = rem * pow10 / den;
  const BigInt r2 = rem * pow10 % den;
  if (r2 * 2 >= den) ++frac; // half away from zero
  if (frac == pow10) {
    frac = 0;
    ++ip;
  }
  std::string out;
  if (negative && !(ip.is_zero() && frac.is_zero())) out += '-';
  out += ip.str();
  if (places > 0) {
    std::string f = frac.str();
    out += '.';
    out += std::string(static_cast<std::size_t>(places) - f.size(), '0');
    out += f;
  }
  return out;
}

} // namespace beauty
