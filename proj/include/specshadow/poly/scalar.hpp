#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "specshadow/error.hpp"

namespace specshadow {

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
using Rational = mpq_class;

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      return false;
    }
  }
  return true;
}

inline mpz_class parse_integer(std::string_view s) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  require(all_digits(body), "malformed integer '" + std::string(s) + "'");
  mpz_class z(std::string(body), 10);
  return negative ? mpz_class(-z) : z;
}

inline mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace detail

/// Parses integers ("-3"), decimals ("0.125", "2.5e-3") and fractions
/// ("p/q") exactly.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  require(!s.empty(), "empty coefficient string");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = detail::parse_integer(s.substr(0, slash));
    std::string_view den_str = s.substr(slash + 1);
    require(detail::all_digits(den_str),
            "malformed denominator in '" + std::string(text) + "'");
    mpz_class den(std::string(den_str), 10);
    require(den != 0, "zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_str = s.substr(e + 1);
    std::string_view digits = exp_str;
    if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) {
      digits.remove_prefix(1);
    }
    require(detail::all_digits(digits) && digits.size() < 6,
            "malformed exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_str));
    s = s.substr(0, e);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  require(!(int_part.empty() && frac_part.empty()) &&
              (int_part.empty() || detail::all_digits(int_part)) &&
              (frac_part.empty() || detail::all_digits(frac_part)),
          "malformed coefficient '" + std::string(text) + "'");
  std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class num(digits.empty() ? std::string("0") : digits, 10);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  Rational q;
  if (scale >= 0) {
    q = Rational(num, detail::pow10(static_cast<unsigned long>(scale)));
  } else {
    q = Rational(num * detail::pow10(static_cast<unsigned long>(-scale)));
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double v) { return v; }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational exact_rational(double v) {
  require(std::isfinite(v), "non-finite value cannot be made rational");
  Rational q(v);
  q.canonicalize();
  return q;
}

/// Nearest rational with denominator 2^bits.
inline Rational dyadic_round(double v, unsigned bits = 40) {
  require(std::isfinite(v), "non-finite value cannot be made rational");
  const double scaled = std::nearbyint(std::ldexp(v, static_cast<int>(bits)));
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, bits);
  Rational q(mpz_class(scaled), den);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Coefficient field of a polynomial: exact rationals or binary64.
template <class F>
concept Coefficient = std::same_as<F, Rational> || std::same_as<F, double>;

template <Coefficient F>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";
  static Rational parse(std::string_view s) { return parse_rational(s); }
  static Rational from_double(double v) { return exact_rational(v); }
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";
  static double parse(std::string_view s) { return to_double(parse_rational(s)); }
  static double from_double(double v) { return v; }
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
};

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double v) { return v == 0.0; }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double v) { return std::abs(v); }

}  // namespace specshadow
