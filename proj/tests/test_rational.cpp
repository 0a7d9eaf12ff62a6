#include "beauty/errors.hpp"
#include "beauty/rational.hpp"

#include <doctest.h>

#include <stdexcept>

using beauty::BigInt;
using beauty::ProtocolError;
using beauty::Rational;

TEST_CASE("rational parsing accepts fractions and bare integers") {
  CHECK(Rational::parse("5/12") == Rational(5, 12));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational::parse("-3/9") == Rational(-1, 3)); // reduced
  CHECK(Rational::parse("+2/4") == Rational(1, 2));
  CHECK(Rational::parse("0/5") == Rational(0));
}

TEST_CASE("rational parsing rejects malformed input") {
  CHECK_THROWS_AS(Rational::parse(""), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("a/b"), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("1.5"), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("2/-3"), ProtocolError); // sign on den
  CHECK_THROWS_AS(Rational::parse("1/0"), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("1/"), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("/2"), ProtocolError);
  CHECK_THROWS_AS(Rational::parse("1 /2"), ProtocolError);
}

TEST_CASE("rational construction normalizes and validates") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(BigInt(3), BigInt(-6)) == Rational(-1, 2)); // sign moves up
  CHECK(Rational(5, 12).numerator() == 5);
  CHECK(Rational(5, 12).denominator() == 12);
  CHECK_THROWS_AS(Rational(BigInt(1), BigInt(0)), std::domain_error);
}

TEST_CASE("rational arithmetic is exact") {
  CHECK(Rational(1, 6) + Rational(1, 3) == Rational(1, 2));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(5, 12) * Rational(12, 5) == Rational(1));
  CHECK(Rational(1, 2) / Rational(1, 3) == Rational(3, 2));
  CHECK(-Rational(2, 3) == Rational(-2, 3));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);

  // 1/3 has no finite binary expansion; exactness would fail in doubles.
  Rational third(1, 3);
  CHECK(third + third + third == Rational(1));
}

TEST_CASE("rational ordering") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(5, 12) <= Rational(5, 12));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 3).sign() == 1);
  CHECK(Rational(-1, 3).sign() == -1);
  CHECK(Rational(0).is_zero());
}

TEST_CASE("rational string forms") {
  CHECK(Rational(5, 12).str() == "5/12");
  CHECK(Rational(3).str() == "3/1");
  CHECK(Rational(-1, 3).str() == "-1/3");

  CHECK(Rational(1, 3).decimal(12) == "0.333333333333");
  CHECK(Rational(5, 12).decimal(12) == "0.416666666667"); // rounds up
  CHECK(Rational(1, 2).decimal(2) == "0.50");
  CHECK(Rational(-1, 8).decimal(2) == "-0.13"); // half away from zero
  CHECK(Rational(1).decimal(3) == "1.000");
  CHECK(Rational(9999, 10000).decimal(3) == "1.000"); // carry into the integer part
  CHECK(Rational(5, 2).decimal(0) == "3");
  CHECK(Rational(-5, 2).decimal(0) == "-3");
  CHECK(Rational(0).decimal(2) == "0.00");
  CHECK(Rational(-1, 1000).decimal(2) == "0.00"); // rounds to zero, no "-0.00"
}

TEST_CASE("rational to_double") {
  CHECK(Rational(1, 2).to_double() == 0.5);
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}
