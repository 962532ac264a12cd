#include "avoid/common.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace avoid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

BigInt parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("malformed number: '" + std::string(whole) + "'");
  BigInt v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed number: '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    BigInt ev = parse_digits(exp_part, whole);
    if (ev > 4000) throw ParseError("exponent out of range: '" + std::string(whole) + "'");
    exponent = static_cast<long>(ev);
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty())
    throw ParseError("malformed number: '" + std::string(whole) + "'");
  BigInt mantissa = int_part.empty() ? BigInt(0) : parse_digits(int_part, whole);
  for (char c : frac_part) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed number: '" + std::string(whole) + "'");
    mantissa = mantissa * 10 + (c - '0');
  }
  exponent -= static_cast<long>(frac_part.size());
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)), s);
    Rational den = parse_decimal(trim(s.substr(slash + 1)), s);
    if (den == 0) throw ParseError("zero denominator: '" + std::string(s) + "'");
    return num / den;
  }
  return parse_decimal(s, s);
}

Rational exact(double value) {
  if (!std::isfinite(value)) throw PreconditionError("non-finite value");
  return Rational(value);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string to_string(const Rational& value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

std::string to_string(const Fraction& value) {
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

}  // namespace avoid
