/// @file vpoly.hpp
/// @brief Polynomials in (v1, v2, v3) with Q(sqrt3, sqrt5) coefficients and
///        their exact moments over Omega = [-1/2, 1/2]^3.
#pragma once

#include <array>
#include <map>

#include "kll/q35.hpp"

namespace kll {

using Exponent3 = std::array<int, 3>;

struct VPolynomial {
  std::map<Exponent3, Q35> terms;  // exponent triple -> coefficient

  static VPolynomial constant(const Q35& c);
  static VPolynomial variable(int axis);  ///< v_axis

  VPolynomial operator+(const VPolynomial& o) const;
  VPolynomial operator-(const VPolynomial& o) const;
  VPolynomial operator*(const VPolynomial& o) const;
  VPolynomial scaled(const Q35& c) const;
  VPolynomial pow(int k) const;
  int degree() const;
};

/// integral of v^alpha over Omega: product over axes of
/// [alpha_i odd -> 0; alpha_i even -> 2^{-alpha_i}/(alpha_i + 1)].
Rational monomial_moment(const Exponent3& alpha);

/// Linear extension of monomial_moment, exact.
Q35 poly_moment(const VPolynomial& p);

// Limit objects of the closure (the epsilon -> 0 polynomials):
VPolynomial e1_limit(int i);        ///< 2 sqrt(3) v_i
VPolynomial e2_limit();             ///< 6 sqrt(5) (|v|^2 - 1/4)
VPolynomial vsq_limit();            ///< |v|^2
VPolynomial A_limit(int i, int j);  ///< v_i v_j - delta_ij |v|^2 / 3
VPolynomial B_limit(int i);         ///< v_i (|v|^2 - 19/60)

}  // namespace kll
