#include "kll/q35.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kll {

Q35 Q35::operator+(const Q35& o) const {
  Q35 r;
  r.q1 = q1 + o.q1;
  r.q3 = q3 + o.q3;
  r.q5 = q5 + o.q5;
  r.q15 = q15 + o.q15;
  return r;
}

Q35 Q35::operator-(const Q35& o) const {
  Q35 r;
  r.q1 = q1 - o.q1;
  r.q3 = q3 - o.q3;
  r.q5 = q5 - o.q5;
  r.q15 = q15 - o.q15;
  return r;
}

Q35 Q35::operator-() const {
  Q35 r;
  r.q1 = -q1;
  r.q3 = -q3;
  r.q5 = -q5;
  r.q15 = -q15;
  return r;
}

Q35 Q35::operator*(const Q35& o) const {
  // basis products: sqrt3*sqrt5 = sqrt15, sqrt3*sqrt15 = 3 sqrt5,
  // sqrt5*sqrt15 = 5 sqrt3, sqrt15^2 = 15
  Q35 r;
  r.q1 = q1 * o.q1 + 3 * q3 * o.q3 + 5 * q5 * o.q5 + 15 * q15 * o.q15;
  r.q3 = q1 * o.q3 + q3 * o.q1 + 5 * (q5 * o.q15 + q15 * o.q5);
  r.q5 = q1 * o.q5 + q5 * o.q1 + 3 * (q3 * o.q15 + q15 * o.q3);
  r.q15 = q1 * o.q15 + q15 * o.q1 + q3 * o.q5 + q5 * o.q3;
  return r;
}

Q35 Q35::inverse() const {
  if (is_zero()) throw std::domain_error("Q35::inverse of zero");
  // conjugates flip the signs of sqrt(3) and/or sqrt(5)
  auto conj = [](const Q35& x, bool f3, bool f5) {
    Q35 r = x;
    if (f3) {
      r.q3 = -r.q3;
      r.q15 = -r.q15;
    }
    if (f5) {
      r.q5 = -r.q5;
      r.q15 = -r.q15;
    }
    return r;
  };
  Q35 c1 = conj(*this, true, false);
  Q35 c2 = conj(*this, false, true);
  Q35 c3 = conj(*this, true, true);
  Q35 prod = c1 * c2 * c3;        // product of the other three conjugates
  Q35 norm = *this * prod;        // field norm, a nonzero rational
  if (!norm.is_rational() || norm.q1 == 0)
    throw std::logic_error("Q35::inverse: norm not a nonzero rational");
  Q35 r = prod;
  Rational inv = Rational(1) / norm.q1;
  r.q1 *= inv;
  r.q3 *= inv;
  r.q5 *= inv;
  r.q15 *= inv;
  return r;
}

double Q35::to_double() const {
  return q1.convert_to<double>() + q3.convert_to<double>() * std::sqrt(3.0) +
         q5.convert_to<double>() * std::sqrt(5.0) + q15.convert_to<double>() * std::sqrt(15.0);
}

std::string Q35::str() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rational& r, const char* tag) {
    if (r == 0) return;
    if (!first) os << (r > 0 ? " + " : " - ");
    else if (r < 0) os << "-";
    Rational a = r < 0 ? Rational(-r) : r;
    os << a;
    if (tag[0] != '\0') os << "*" << tag;
    first = false;
  };
  emit(q1, "");
  emit(q3, "sqrt(3)");
  emit(q5, "sqrt(5)");
  emit(q15, "sqrt(15)");
  if (first) os << "0";
  return os.str();
}

}  // namespace kll
