#pragma once

#include "beauty/rational.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace beauty {

/*
 * Exact, order-independent accumulator for doubles. Every finite double is
 * an integer multiple of 2^-1074, so the running sum is kept as that integer
 * in a bignum. Addition never rounds, which makes merging partial sums from
 * parallel substreams associative and bit-reproducible: any partition of the
 * same terms yields the same accumulator.
 */
class ExactSum {
public:
  void add(double x) {
    if (x == 0.0) return;
    if (!std::isfinite(x)) throw std::invalid_argument("ExactSum: non-finite term");
    int exp = 0;
    const double m = std::frexp(x, &exp);
    const auto m53 = static_cast<long long>(std::ldexp(m, 53)); // exact by construction
    const int shift = kScaleBits + exp - 53;
    BigInt term(m53 < 0 ? -m53 : m53);
    if (shift >= 0) {
      term <<= shift;
    } else {
      term >>= -shift; // denormal inputs only; discarded bits are zero
    }
    acc_ += m53 < 0 ? -term : term;
  }

  ExactSum& operator+=(const ExactSum& o) {
    acc_ += o.acc_;
    return *this;
  }

  BigRational exact() const { return BigRational(acc_, BigInt(1) << kScaleBits); }
  double value() const { return exact().convert_to<double>(); }
  bool is_zero() const { return acc_.is_zero(); }

  bool operator==(const ExactSum&) const = default;

private:
  static constexpr int kScaleBits = 1074;
  BigInt acc_ = 0;
};

} // namespace beauty
