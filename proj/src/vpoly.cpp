#include "kll/vpoly.hpp"

#include <stdexcept>

namespace kll {

VPolynomial VPolynomial::constant(const Q35& c) {
  VPolynomial p;
  if (!c.is_zero()) p.terms[{0, 0, 0}] = c;
  return p;
}

VPolynomial VPolynomial::variable(int axis) {
  VPolynomial p;
  Exponent3 e{0, 0, 0};
  e[axis] = 1;
  p.terms[e] = Q35::rat(1);
  return p;
}

VPolynomial VPolynomial::operator+(const VPolynomial& o) const {
  VPolynomial r = *this;
  for (const auto& [e, c] : o.terms) {
    auto it = r.terms.find(e);
    if (it == r.terms.end())
      r.terms[e] = c;
    else {
      it->second = it->second + c;
      if (it->second.is_zero()) r.terms.erase(it);
    }
  }
  return r;
}

VPolynomial VPolynomial::operator-(const VPolynomial& o) const {
  return *this + o.scaled(Q35::rat(-1));
}

VPolynomial VPolynomial::operator*(const VPolynomial& o) const {
  VPolynomial r;
  for (const auto& [e1, c1] : terms)
    for (const auto& [e2, c2] : o.terms) {
      Exponent3 e{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]};
      Q35 c = c1 * c2;
      auto it = r.terms.find(e);
      if (it == r.terms.end())
        r.terms[e] = c;
      else {
        it->second = it->second + c;
        if (it->second.is_zero()) r.terms.erase(it);
      }
    }
  return r;
}

VPolynomial VPolynomial::scaled(const Q35& c) const {
  VPolynomial r;
  if (c.is_zero()) return r;
  for (const auto& [e, v] : terms) r.terms[e] = v * c;
  return r;
}

VPolynomial VPolynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("VPolynomial::pow: negative exponent");
  VPolynomial r = constant(Q35::rat(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

int VPolynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

Rational monomial_moment(const Exponent3& alpha) {
  Rational prod(1);
  for (int d = 0; d < 3; ++d) {
    const int a = alpha[d];
    if (a < 0) throw std::invalid_argument("monomial_moment: negative exponent");
    if (a & 1) return Rational(0);
    Rational pw(1);
    for (int k = 0; k < a; ++k) pw *= 2;
    prod *= Rational(1) / (pw * (a + 1));
  }
  return prod;
}

Q35 poly_moment(const VPolynomial& p) {
  Q35 acc;
  for (const auto& [e, c] : p.terms) acc = acc + c * Q35(monomial_moment(e));
  return acc;
}

VPolynomial e1_limit(int i) { return VPolynomial::variable(i).scaled(Q35::sqrt3(2)); }

VPolynomial vsq_limit() {
  VPolynomial s;
  for (int d = 0; d < 3; ++d) s = s + VPolynomial::variable(d) * VPolynomial::variable(d);
  return s;
}

VPolynomial e2_limit() {
  VPolynomial p = vsq_limit() - VPolynomial::constant(Q35::rat(1, 4));
  return p.scaled(Q35::sqrt5(6));
}

VPolynomial A_limit(int i, int j) {
  VPolynomial p = VPolynomial::variable(i) * VPolynomial::variable(j);
  if (i == j) p = p - vsq_limit().scaled(Q35::rat(1, 3));
  return p;
}

VPolynomial B_limit(int i) {
  return VPolynomial::variable(i) * (vsq_limit() - VPolynomial::constant(Q35::rat(19, 60)));
}

}  // namespace kll
