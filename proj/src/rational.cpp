#include "stochmatch/rational.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace stochmatch {

namespace {

BigInt parse_integer(const std::string& digits) {
  if (digits.empty()) throw std::invalid_argument("empty number");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed number: " + digits);
    }
  }
  return BigInt(digits);
}

}  // namespace

Rational rational_from_text(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  if (s.empty()) throw std::invalid_argument("malformed rational: " + text);

  Rational value;
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_integer(s.substr(0, slash));
    BigInt den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    value = Rational(num, den);
  } else {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      value = Rational(parse_integer(s));
    } else {
      std::string whole = s.substr(0, dot);
      std::string frac = s.substr(dot + 1);
      if (whole.empty()) whole = "0";
      if (frac.empty()) throw std::invalid_argument("malformed rational: " + text);
      BigInt scale = 1;
      for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
      value = Rational(parse_integer(whole) * scale + parse_integer(frac), scale);
    }
  }
  return negative ? -value : value;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << r;
  return out.str();
}

}  // namespace stochmatch
