#include "robust/numeric.hpp"

#include <algorithm>
#include <cctype>

namespace robust {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

BigInt parse_unsigned(std::string_view s, std::string_view whole) {
  if (!all_digits(s)) throw ConfigError("not an integer: '" + std::string(whole) + "'");
  // A leading zero would make the string constructor read octal.
  s.remove_prefix(std::min(s.find_first_not_of('0'), s.size() - 1));
  return BigInt(std::string(s));
}

BigInt ten_pow(unsigned digits) {
  BigInt p = 1;
  for (unsigned i = 0; i < digits; ++i) p *= 10;
  return p;
}

}  // namespace

BigInt parse_bigint(std::string_view text) {
  auto s = trim(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  BigInt value;
  if (auto caret = s.find('^'); caret != std::string_view::npos) {
    BigInt base = parse_unsigned(s.substr(0, caret), text);
    BigInt exponent = parse_unsigned(s.substr(caret + 1), text);
    if (exponent > 1'000'000) throw ConfigError("exponent too large: '" + std::string(text) + "'");
    value = boost::multiprecision::pow(base, exponent.convert_to<unsigned>());
  } else {
    value = parse_unsigned(s, text);
  }
  return negative ? BigInt(-value) : value;
}

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_bigint(s.substr(0, slash));
    BigInt den = parse_bigint(s.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator: '" + std::string(text) + "'");
    return Rational(num, den);
  }
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6)
      throw ConfigError("bad exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto int_part = s.substr(0, dot);
    auto frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw ConfigError("not a number: '" + std::string(text) + "'");
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
      throw ConfigError("not a number: '" + std::string(text) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    fraction_digits = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) throw ConfigError("not a number: '" + std::string(text) + "'");
    digits = std::string(s);
  }
  if (digits.empty()) digits = "0";
  const BigInt mantissa = parse_unsigned(digits, text);
  long scale = exponent - fraction_digits;
  Rational value = scale >= 0 ? Rational(mantissa * ten_pow(static_cast<unsigned>(scale)))
                              : Rational(mantissa, ten_pow(static_cast<unsigned>(-scale)));
  return negative ? Rational(-value) : value;
}

std::string to_string(const BigInt& value) { return value.str(); }

std::string to_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

HighFloat to_high(const BigInt& value) { return HighFloat(value); }

HighFloat to_high(const Rational& value) {
  return HighFloat(boost::multiprecision::numerator(value)) /
         HighFloat(boost::multiprecision::denominator(value));
}

HighFloat ln(const Rational& value) {
  if (value <= 0) throw DomainError("logarithm of a non-positive number");
  return boost::multiprecision::log(HighFloat(boost::multiprecision::numerator(value))) -
         boost::multiprecision::log(HighFloat(boost::multiprecision::denominator(value)));
}

Rational round_up(const HighFloat& value, unsigned digits) {
  const BigInt scale = ten_pow(digits);
  HighFloat scaled = boost::multiprecision::ceil(value * HighFloat(scale));
  return Rational(scaled.convert_to<BigInt>(), scale);
}

Rational round_down(const HighFloat& value, unsigned digits) {
  const BigInt scale = ten_pow(digits);
  HighFloat scaled = boost::multiprecision::floor(value * HighFloat(scale));
  return Rational(scaled.convert_to<BigInt>(), scale);
}

BigInt floor(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  BigInt q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  BigInt q = num / den;
  if (num > 0 && q * den != num) q += 1;
  return q;
}

}  // namespace robust
