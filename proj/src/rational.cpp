#include "krf/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace krf {

Rational to_rational(double value, double rel_tol) {
  if (!std::isfinite(value)) throw std::domain_error("to_rational: non-finite value");
  if (value == 0.0) return Rational(0);
  const double target = value;
  double x = value;
  // Convergents h/k of the continued fraction of x.
  boost::multiprecision::cpp_int h_prev = 1, h = static_cast<long long>(std::floor(x));
  boost::multiprecision::cpp_int k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    Rational approx(h, k);
    if (std::abs(to_double(approx) - target) <= rel_tol * std::max(1.0, std::abs(target))) return approx;
    if (frac == 0.0) return approx;
    x = 1.0 / frac;
    const double a = std::floor(x);
    frac = x - a;
    boost::multiprecision::cpp_int ai = static_cast<long long>(a);
    boost::multiprecision::cpp_int h_next = ai * h + h_prev;
    boost::multiprecision::cpp_int k_next = ai * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return Rational(value);
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + text + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
  boost::multiprecision::cpp_int mant = 0;
  int scale = 0;
  bool any_digit = false, seen_dot = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      mant = mant * 10 + (c - '0');
      if (seen_dot) --scale;
      any_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("parse_rational: not a number '" + text + "'");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(text.substr(pos + 1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_rational: bad exponent in '" + text + "'");
    }
    scale += e;
    pos += 1 + used;
  }
  if (pos != text.size()) throw std::invalid_argument("parse_rational: trailing characters in '" + text + "'");
  Rational r(mant);
  boost::multiprecision::cpp_int ten_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), std::abs(scale));
  r = scale >= 0 ? r * Rational(ten_pow) : r / Rational(ten_pow);
  return negative ? -r : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace krf
