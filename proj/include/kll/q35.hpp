/// @file q35.hpp
/// @brief Exact arithmetic in the field Q(sqrt 3, sqrt 5), stored as
///        q1 + q3*sqrt(3) + q5*sqrt(5) + q15*sqrt(15) over exact rationals.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace kll {

using Rational = boost::multiprecision::cpp_rational;

struct Q35 {
  Rational q1{0}, q3{0}, q5{0}, q15{0};

  Q35() = default;
  Q35(long num, long den) : q1(Rational(num) / den) {}
  explicit Q35(const Rational& r) : q1(r) {}

  static Q35 rat(long num, long den = 1) { return Q35(num, den); }
  static Q35 sqrt3(const Rational& coeff = 1) {
    Q35 v;
    v.q3 = coeff;
    return v;
  }
  static Q35 sqrt5(const Rational& coeff = 1) {
    Q35 v;
    v.q5 = coeff;
    return v;
  }
  static Q35 sqrt15(const Rational& coeff = 1) {
    Q35 v;
    v.q15 = coeff;
    return v;
  }

  bool operator==(const Q35& o) const {
    return q1 == o.q1 && q3 == o.q3 && q5 == o.q5 && q15 == o.q15;
  }
  bool operator!=(const Q35& o) const { return !(*this == o); }
  bool is_zero() const { return q1 == 0 && q3 == 0 && q5 == 0 && q15 == 0; }
  bool is_rational() const { return q3 == 0 && q5 == 0 && q15 == 0; }

  Q35 operator+(const Q35& o) const;
  Q35 operator-(const Q35& o) const;
  Q35 operator-() const;
  Q35 operator*(const Q35& o) const;
  /// Exact inverse via the Galois conjugates; throws on zero.
  Q35 inverse() const;
  Q35 operator/(const Q35& o) const { return *this * o.inverse(); }

  double to_double() const;
  std::string str() const;  ///< e.g. "97/75600" or "2/5*sqrt(5)"
};

}  // namespace kll
