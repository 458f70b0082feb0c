#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace momentforge {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ScalarMode { Rational, Float };

inline std::string_view to_string(ScalarMode mode) {
  return mode == ScalarMode::Rational ? "rational" : "float";
}

template <class S>
concept Scalar = std::same_as<S, Rational> || std::same_as<S, double>;

template <Scalar S>
inline constexpr ScalarMode scalar_mode_v =
    std::same_as<S, Rational> ? ScalarMode::Rational : ScalarMode::Float;

template <Scalar S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

template <Scalar S>
S from_integer(const Integer& z) {
  if constexpr (is_exact_v<S>) {
    return Rational(z);
  } else {
    return z.get_d();
  }
}

template <Scalar S>
S from_long(long v) {
  return S(v);
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double x) { return std::fabs(x); }

inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(double x) { return (x > 0) - (x < 0); }

/// base^e with 0^0 = 1.
template <Scalar S>
S ipow(const S& base, unsigned e) {
  S result(1);
  S b = base;
  while (e != 0) {
    if (e & 1U) result *= b;
    e >>= 1U;
    if (e != 0) b *= b;
  }
  return result;
}

/// Exact conversion; every finite double is a dyadic rational.
inline Rational exact_rational(double x) { return Rational(x); }

template <Scalar To, Scalar From>
To convert_scalar(const From& x) {
  if constexpr (std::same_as<To, From>) {
    return x;
  } else if constexpr (is_exact_v<To>) {
    return exact_rational(x);
  } else {
    return to_double(x);
  }
}

/// Rationals print as "p/q" (or "p" for integers), canonical form.
inline std::string scalar_to_string(const Rational& q) { return q.get_str(); }
std::string scalar_to_string(double x);

/// Accepts "p/q", "p", and (float mode only) decimal / scientific notation and
/// the tokens "inf", "-inf", "nan". Throws ParseError.
Rational parse_rational(std::string_view text);
double parse_double(std::string_view text);

template <Scalar S>
S parse_scalar(std::string_view text) {
  if constexpr (is_exact_v<S>) {
    return parse_rational(text);
  } else {
    return parse_double(text);
  }
}

/// Relative closeness, max(|a|,|b|,1) scaled.
inline bool near(double a, double b, double tol) {
  if (a == b) return true;
  const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= tol * scale;
}

}  // namespace momentforge
