#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Core>

namespace lassocert {

/// Arbitrary-precision integers and rationals. Expression templates are off so
/// the types compose with Eigen's own expression machinery.
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ExactVector = Vector<Rational>;
using ExactMatrix = Matrix<Rational>;
using Index = Eigen::Index;

/// Parses "17", "-3/4", "+2", "1.25", "-.5" into a canonical rational.
/// Throws std::invalid_argument on anything else (including a zero denominator).
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// "(a, b, c)"
std::string to_string(const ExactVector& v);

Rational make_rational(long numerator, long denominator = 1);

ExactVector make_vector(std::initializer_list<Rational> entries);

/// Least common multiple of the denominators in `values`.
template <typename Range>
Integer denominator_lcm(const Range& values) {
  Integer result = 1;
  for (const Rational& v : values) {
    result = boost::multiprecision::lcm(result, Integer(denominator(v)));
  }
  return result;
}

}  // namespace lassocert
