#pragma once

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>

namespace umbilic4 {

using Rational = mpq_class;

/// Exact element a + b√2 + c√5 + d√10 of the field Q(√2, √5).
class AlgebraicScalar {
 public:
  AlgebraicScalar() = default;
  template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
  AlgebraicScalar(I v) : c_{Rational(static_cast<long>(v)), 0, 0, 0} {}
  AlgebraicScalar(const Rational& a, const Rational& b = 0, const Rational& c = 0,
                  const Rational& d = 0);

  static AlgebraicScalar sqrt2() { return {0, 1, 0, 0}; }
  static AlgebraicScalar sqrt5() { return {0, 0, 1, 0}; }
  static AlgebraicScalar sqrt10() { return {0, 0, 0, 1}; }
  static AlgebraicScalar ratio(long num, long den) { return AlgebraicScalar(Rational(num, den)); }

  const Rational& coeff(int k) const { return c_[k]; }

  bool is_zero() const;
  bool is_rational() const { return c_[1] == 0 && c_[2] == 0 && c_[3] == 0; }
  /// Exact sign (-1, 0, +1).
  int sign() const;
  double to_double() const;

  /// Field automorphism √5 -> -√5 (fixes √2).
  AlgebraicScalar conj5() const { return {c_[0], c_[1], -c_[2], -c_[3]}; }
  AlgebraicScalar inverse() const;

  AlgebraicScalar& operator+=(const AlgebraicScalar& o);
  AlgebraicScalar& operator-=(const AlgebraicScalar& o);
  AlgebraicScalar& operator*=(const AlgebraicScalar& o);
  AlgebraicScalar& operator/=(const AlgebraicScalar& o) { return *this *= o.inverse(); }

  friend AlgebraicScalar operator+(AlgebraicScalar a, const AlgebraicScalar& b) { return a += b; }
  friend AlgebraicScalar operator-(AlgebraicScalar a, const AlgebraicScalar& b) { return a -= b; }
  friend AlgebraicScalar operator*(AlgebraicScalar a, const AlgebraicScalar& b) { return a *= b; }
  friend AlgebraicScalar operator/(AlgebraicScalar a, const AlgebraicScalar& b) { return a /= b; }
  AlgebraicScalar operator-() const { return {-c_[0], -c_[1], -c_[2], -c_[3]}; }

  friend bool operator==(const AlgebraicScalar& a, const AlgebraicScalar& b) { return a.c_ == b.c_; }
  friend bool operator!=(const AlgebraicScalar& a, const AlgebraicScalar& b) { return !(a == b); }

  /// Canonical text form, e.g. "1/2-3/4*sqrt5"; "0" for zero.
  std::string to_string() const;
  /// Inverse of to_string; also accepts plain integers/fractions and bare "sqrt5".
  static AlgebraicScalar parse(std::string_view text);

 private:
  std::array<Rational, 4> c_{};
};

// Uniform helpers so templates can run over double and AlgebraicScalar alike.
inline double to_double(double x) { return x; }
inline double to_double(const AlgebraicScalar& x) { return x.to_double(); }
inline bool exactly_zero(double x) { return x == 0.0; }
inline bool exactly_zero(const AlgebraicScalar& x) { return x.is_zero(); }
inline int sign_of(double x, double tol = 1e-12) { return x > tol ? 1 : (x < -tol ? -1 : 0); }
inline int sign_of(const AlgebraicScalar& x) { return x.sign(); }

}  // namespace umbilic4
