#include "lassocert/rational.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace lassocert {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad_numeral(std::string_view text) {
  throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
}

// GMP reads a leading 0 as an octal prefix, so strip it first.
Integer decimal_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? Integer(0) : Integer(std::string(digits.substr(first)));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_numeral(text);
    Integer d = decimal_integer(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    result = Rational(decimal_integer(num), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      bad_numeral(text);
    }
    std::string digits = std::string(whole) + std::string(frac);
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
    result = Rational(decimal_integer(digits), scale);
  } else {
    if (!all_digits(s)) bad_numeral(text);
    result = Rational(decimal_integer(s));
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

std::string to_string(const ExactVector& v) {
  std::ostringstream out;
  out << '(';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << to_string(v(i));
  }
  out << ')';
  return out.str();
}

Rational make_rational(long numerator, long denominator) {
  return Rational(Integer(numerator), Integer(denominator));
}

ExactVector make_vector(std::initializer_list<Rational> entries) {
  ExactVector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (const Rational& e : entries) v(i++) = e;
  return v;
}

}  // namespace lassocert
