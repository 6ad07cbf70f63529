#ifndef STOCHMATCH_RATIONAL_HPP_
#define STOCHMATCH_RATIONAL_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace stochmatch {

/// Arbitrary-precision rational, used wherever an operation offers an exact
/// mode (enumeration oracles, S_n closed forms, hazards of the dynamic
/// program).  Values are always kept normalized by the underlying type.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p/q", "p", or a plain decimal such as "0.125" into an exact
/// rational.  Throws std::invalid_argument on malformed input.
Rational rational_from_text(const std::string& text);

/// Lossless conversion for display and for mixed double/rational checks.
double to_double(const Rational& r);

/// Canonical "p/q" (or "p" when the denominator is 1) rendering.
std::string to_string(const Rational& r);

}  // namespace stochmatch

#endif  // STOCHMATCH_RATIONAL_HPP_
