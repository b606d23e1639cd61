#pragma once

// Exact rational arithmetic for the decision procedures. Floats never decide
// anything on this side of the project.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace qxlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parse "p/q" or "p" (optional sign). Throws std::invalid_argument on junk,
/// including decimal notation: exact inputs only.
Rational parse_rational(const std::string& text);

/// "p/q" (or "p" when the denominator is 1), normalized.
std::string rational_to_string(const Rational& r);

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return a / boost::multiprecision::gcd(a, b) * b;
}

}  // namespace qxlab
