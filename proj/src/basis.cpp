#include "kll/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace kll {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr long double kPiL = 3.14159265358979323846264338328L;
}  // namespace

Complex sawtooth_coeff(int m) {
  if (m == 0) return {0.0, 0.0};
  double s = ((m & 1) ? -1.0 : 1.0) / (2.0 * kPi * m);
  return {0.0, s};
}

Complex vsq_coeff(int m) {
  if (m == 0) return {1.0 / 12.0, 0.0};
  double s = ((m & 1) ? -1.0 : 1.0) / (2.0 * kPi * kPi * double(m) * double(m));
  return {s, 0.0};
}

double sum_saw_sq(int nv) {
  long double acc = 0.0L;
  for (int m = 1; m < nv; ++m) acc += 1.0L / (4.0L * kPiL * kPiL * m * m);
  return double(2.0L * acc);
}

double sum_vsq_sq(int nv) {
  long double acc = 1.0L / 144.0L;
  for (int m = 1; m < nv; ++m) acc += 2.0L / (4.0L * kPiL * kPiL * kPiL * kPiL * m * m * m * m);
  return double(acc);
}

namespace {
inline std::complex<long double> saw_hat_l(long m) {
  if (m == 0) return {0.0L, 0.0L};
  return {0.0L, ((m & 1) ? -1.0L : 1.0L) / (2.0L * kPiL * m)};
}
inline std::complex<long double> vsq_hat_l(long m) {
  if (m == 0) return {1.0L / 12.0L, 0.0L};
  return {((m & 1) ? -1.0L : 1.0L) / (2.0L * kPiL * kPiL * m * m), 0.0L};
}
}  // namespace

double bracket_vvs_vsq(int nv) {
  // <v_eps * v * Lam(v^2)> = sum_{|p|<N, |q|<N} s(p) w(q) conj(s(p+q))
  std::complex<long double> acc{0.0L, 0.0L};
  for (int p = -(nv - 1); p < nv; ++p) {
    if (p == 0) continue;
    for (int q = -(nv - 1); q < nv; ++q)
      acc += saw_hat_l(p) * vsq_hat_l(q) * std::conj(saw_hat_l(long(p) + q));
  }
  return double(acc.real());
}

double bracket_saw_self_vsq(int nv) {
  // <v_eps * v_eps * Lam(v^2)>: triple sum s(p) s(q) w(r) over p+q+r = 0,
  // all three factors band-limited
  std::complex<long double> acc{0.0L, 0.0L};
  for (int p = -(nv - 1); p < nv; ++p)
    for (int q = -(nv - 1); q < nv; ++q) {
      long r = -long(p) - q;
      if (r <= -long(nv) || r >= long(nv)) continue;
      acc += saw_hat_l(p) * saw_hat_l(q) * vsq_hat_l(r);
    }
  return double(acc.real());
}

double cutoff_l2_error(int nv, int s) {
  long double acc = 0.0L;
  // tail sum over |m| >= nv of |coeff|^2; truncate when increments vanish
  for (long m = nv; m < 4000000; ++m) {
    long double t;
    if (s == 1)
      t = 1.0L / (4.0L * kPiL * kPiL * m * m);
    else
      t = 1.0L / (4.0L * kPiL * kPiL * kPiL * kPiL * m * m * m * m);
    acc += 2.0L * t;
    if (t < 1e-26L * acc) break;
  }
  return double(std::sqrt((long double)acc));
}

BasisSet build_basis(const Band& band) {
  if (band.nv < 2)
    throw std::invalid_argument("build_basis: nv >= 2 required to distinguish v and v^2");
  BasisSet b;
  b.band = band;
  const int S = band.nv - 1;

  for (int i = 0; i < 3; ++i) {
    for (int m = -S; m <= S; ++m) {
      if (m == 0) continue;
      Mode3 mm{0, 0, 0};
      mm[i] = m;
      b.v_eps[i].add(mm, sawtooth_coeff(m));
    }
    for (int m = -S; m <= S; ++m) {
      Mode3 mm{0, 0, 0};
      mm[i] = m;
      b.vsq_eps[i].add(mm, vsq_coeff(m));
    }
    b.v_eps[i].compress();
    b.vsq_eps[i].compress();
  }

  // c1 from <(c1 Lam(v_i))^2> = 1 (Plancherel over the analytic coefficients)
  const double s2 = sum_saw_sq(band.nv);
  b.c1 = 1.0 / std::sqrt(s2);

  // (c2, c0) from the per-component pair: mean zero gives c0 = c2 * <Lam(v^2)>
  // = c2/12 (mode 0 always kept); unit norm then reads
  // c2^2 (<Lam(v^2),Lam(v^2)> - 1/144) = 1. The 2x2 system is diagonal after
  // the substitution; it would only degenerate if the band dropped every
  // nonzero mode of v^2, excluded by nv >= 2.
  const double u = sum_vsq_sq(band.nv);
  const double denom = u - 1.0 / 144.0;
  if (!(denom > 0.0)) throw std::logic_error("build_basis: normalization system singular");
  b.c2 = 1.0 / std::sqrt(denom);
  b.c0 = b.c2 / 12.0;

  b.e0.add({0, 0, 0}, {1.0, 0.0});
  b.e0.compress();
  for (int i = 0; i < 3; ++i) {
    b.e1[i] = b.v_eps[i];
    b.e1[i] *= b.c1;
  }
  for (int i = 0; i < 3; ++i) {
    VWeight t = b.vsq_eps[i];
    t *= b.c2;
    t.add({0, 0, 0}, {-b.c0, 0.0});
    t.compress();
    b.e2_sum.axpy(1.0, t);
  }
  b.e2 = b.e2_sum;
  b.e2 *= 1.0 / BasisSet::e2_sum_norm();

  // Gram({e0, e1_1..3, e2}) must be I5; e1 _|_ {e0, e2} holds by parity and is
  // asserted here along with the normalizations.
  const VWeight* basis[5] = {&b.e0, &b.e1[0], &b.e1[1], &b.e1[2], &b.e2};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double g = basis[i]->dot(*basis[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  b.gram_residual = worst;
  if (worst > 1e-12) throw std::logic_error("build_basis: Gram identity violated");
  return b;
}

}  // namespace kll
