/// @file basis.hpp
/// @brief Cutoff Legendre basis on Omega_v: the band-limited sawtooth and
///        quadratic weights, their orthonormalization constants, and the
///        exact 1-D Plancherel sums behind them.
#pragma once

#include "kll/field.hpp"

namespace kll {

/// F(v)(m) on [-1/2,1/2]: 0 at m = 0, (-1)^m i/(2 pi m) otherwise.
Complex sawtooth_coeff(int m);
/// F(v^2)(m): 1/12 at m = 0, (-1)^m/(2 pi^2 m^2) otherwise.
Complex vsq_coeff(int m);

/// Exact 1-D brackets over the band |m| < nv (long-double accumulation):
double sum_saw_sq(int nv);          ///< <v_eps, v_eps> = sum |s(m)|^2
double sum_vsq_sq(int nv);          ///< <Lam(v^2), Lam(v^2)> = sum |w(m)|^2
double bracket_vvs_vsq(int nv);     ///< <v_eps * v * Lam(v^2)>
double bracket_saw_self_vsq(int nv);///< <v_eps * v_eps * Lam(v^2)>

struct BasisSet {
  Band band;
  VWeight v_eps[3];    ///< Lam^{v_i}(v_i)
  VWeight vsq_eps[3];  ///< Lam^{v_i}(v_i^2)
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  ///< orthonormalization constants
  VWeight e0;      ///< constant 1
  VWeight e1[3];   ///< c1 * v_eps[i]
  VWeight e2;      ///< unit vector along sum_i (c2 vsq_eps[i] - c0); see e2_sum
  VWeight e2_sum;  ///< sum_i (c2 vsq_eps[i] - c0); exact L2 norm sqrt(3)
  double gram_residual = 0.0;  ///< max |Gram({e0,e1,e2}) - I5| at build time

  /// Scale between the two quadratic-weight normalizations:
  /// e2_sum = sqrt(3) * e2 exactly, at every band.
  static double e2_sum_norm() { return 1.7320508075688772935; }
};

/// Assembles the weights from the analytic coefficients, solves the
/// orthonormalization conditions (c1 from unit first moments; c0, c2 from the
/// per-component mean-zero + unit-norm pair), and verifies the Gram identity.
/// Requires nv >= 2 so that v and v^2 are distinguishable in band.
BasisSet build_basis(const Band& band);

/// Plancherel tail: || Lam^{v_i}(v_i^s) - v_i^s ||_{L2} for s in {1, 2}.
double cutoff_l2_error(int nv, int s);

}  // namespace kll
