#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace krf {

using Rational = boost::multiprecision::cpp_rational;

/// Nearest simple fraction to `value` by continued-fraction expansion.
/// Decimal inputs such as 1.2 come back as 6/5 rather than the binary
/// expansion of the double.
Rational to_rational(double value, double rel_tol = 1e-14);

/// Parse a decimal literal ("1.25", "-3", "2e-1", "7/3") exactly.
Rational parse_rational(const std::string& text);

double to_double(const Rational& r);

/// Dense polynomial, coefficient i multiplies q^i. Trailing zeros are trimmed.
template <class Scalar>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(Scalar c) { return Polynomial({c}); }
  /// a + b q
  static Polynomial linear(Scalar a, Scalar b) { return Polynomial({a, b}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Scalar(0); }

  Scalar operator()(const Scalar& q) const {
    Scalar acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + *it;
    return acc;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Scalar> r(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Scalar& s, const Polynomial& p) {
    std::vector<Scalar> r(p.c_);
    for (auto& v : r) v *= s;
    return Polynomial(std::move(r));
  }

  /// Synthetic division by (q - root). Returns quotient; `remainder` receives p(root).
  Polynomial divide_linear(const Scalar& root, Scalar& remainder) const {
    if (c_.empty()) {
      remainder = Scalar(0);
      return {};
    }
    std::vector<Scalar> quot(c_.size() - 1, Scalar(0));
    Scalar carry(0);
    for (int i = degree(); i >= 0; --i) {
      Scalar v = c_[i] + carry * root;
      if (i > 0) quot[i - 1] = v;
      else remainder = v;
      carry = v;
    }
    return Polynomial(std::move(quot));
  }

  Polynomial derivative() const {
    std::vector<Scalar> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(Scalar(static_cast<long>(i)) * c_[i]);
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == Scalar(0)) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

using RationalPolynomial = Polynomial<Rational>;

}  // namespace krf
