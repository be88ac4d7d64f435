#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ergolab {

/// Exact rational used for every measure in the library.
using Rational = boost::multiprecision::cpp_rational;
/// Arbitrary precision integer (tiling counts, numerators).
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(const BigInt& num, const BigInt& den) { return Rational(num, den); }

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "num/den", or just "num" for integers.
inline std::string to_string(const Rational& r) {
  auto den = denominator_of(r);
  if (den == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ergolab
