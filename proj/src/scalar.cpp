#include "momentforge/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "momentforge/error.hpp"

namespace momentforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char ch : s)
    if (ch < '0' || ch > '9') return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return Integer(std::string(s), 10);
}

}  // namespace

std::string scalar_to_string(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rational parse_rational(std::string_view text) {
  const auto s = trim(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = trim(s.substr(0, slash));
    const auto den = trim(s.substr(slash + 1));
    if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-')
      throw ParseError("malformed rational '" + std::string(text) + "'");
    Integer d = parse_integer(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational q(parse_integer(num), d);
    q.canonicalize();
    return q;
  }
  if (is_integer_text(s)) return Rational(parse_integer(s));
  // Terminating decimal such as -1.25, read exactly.
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    bool negative = false;
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) {
      negative = whole.front() == '-';
      whole.remove_prefix(1);
    }
    const bool digits_ok = (whole.empty() || is_integer_text(whole)) && (frac.empty() || is_integer_text(frac)) &&
                           !(whole.empty() && frac.empty()) && (frac.empty() || (frac.front() != '-' && frac.front() != '+'));
    if (digits_ok) {
      Integer num = whole.empty() ? Integer(0) : parse_integer(whole);
      Integer den = 1;
      for (char ch : frac) {
        num = num * 10 + (ch - '0');
        den *= 10;
      }
      Rational q(negative ? Integer(-num) : num, den);
      q.canonicalize();
      return q;
    }
  }
  throw ParseError("malformed rational '" + std::string(text) + "'");
}

double parse_double(std::string_view text) {
  const auto s = trim(text);
  if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s.find('/') != std::string_view::npos) return parse_rational(s).get_d();
  auto body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty())
    throw ParseError("malformed number '" + std::string(text) + "'");
  return v;
}

}  // namespace momentforge
