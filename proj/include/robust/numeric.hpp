#pragma once

// Exact arithmetic used throughout: universe elements are arbitrary-precision
// integers, densities and tolerances are exact rationals, and closed-form
// bounds are evaluated in 50-digit decimal floating point.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace robust {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using HighFloat = boost::multiprecision::cpp_dec_float_50;

/// A member of the universe [N] = {1, ..., N}.
using Element = BigInt;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised for mathematically undefined requests, e.g. the density of an empty
/// sequence.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "17", "2^64" and "a^b" powers. Throws ConfigError on malformed input.
BigInt parse_bigint(std::string_view text);

// Accepts integers, fractions ("3/8") and decimals ("0.25", "2.5e-3").
Rational parse_rational(std::string_view text);

std::string to_string(const BigInt& value);

// Lowest terms: "0", "7", "3/500".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

HighFloat to_high(const BigInt& value);
HighFloat to_high(const Rational& value);

// Natural logarithm of a positive rational at 50 significant digits.
HighFloat ln(const Rational& value);

// Smallest rational with denominator 10^digits that is >= value (resp. <=).
Rational round_up(const HighFloat& value, unsigned digits = 30);
Rational round_down(const HighFloat& value, unsigned digits = 30);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);

inline BigInt pow2(unsigned exponent) {
  BigInt result = 1;
  result <<= exponent;
  return result;
}

}  // namespace robust
