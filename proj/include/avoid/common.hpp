#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace avoid {

/// Arbitrary-precision rational used wherever a certificate must be exact.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Small exact fraction for densities of finite periodic sets.
using Fraction = boost::rational<std::int64_t>;

/// A caller-side precondition was violated. The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input text could not be parsed.
class ParseError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// An exact solver hit its configured work limit before proving optimality.
class SolverLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "3", "-2", "0.125", "1e-3", "2.5E2" or "7/3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact(double value);

double to_double(const Rational& value);

std::string to_string(const Rational& value);
std::string to_string(const Fraction& value);

}  // namespace avoid
