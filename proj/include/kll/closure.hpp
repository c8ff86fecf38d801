/// @file closure.hpp
/// @brief Kernel-orthogonal tensors A, B, their defining constants
///        (a, b, det D, c), the mu-constants, and the analytic limit table.
#pragma once

#include "kll/basis.hpp"

namespace kll {

struct ClosureLimits {
  double a = 1.0 / 3.0;
  double b = 0.0;
  double det_D = 1.0 / 60.0;
  double c = 19.0 / 60.0;
  double mu1 = 0.086066296582387;   // sqrt(15)/45
  double mu2 = 0.288675134594813;   // sqrt(3)/6
  double mu3 = 0.258198889747161;   // sqrt(15)/15
  double mu4 = 19.0 / 180.0;
  double mu5 = 0.894427190999916;   // 2 sqrt(5)/5
  double mu6 = 15.0 / 19.0;
  double mu7 = 0.365655170486763;   // 19 sqrt(3)/90
  double c1 = 3.464101615137754;    // 2 sqrt(3)
  double c2 = 13.416407864998739;   // 6 sqrt(5)
  double c0 = 1.118033988749895;    // sqrt(5)/2
};

struct ClosureConstants {
  double a_eps = 0.0, b_eps = 0.0, det_D = 0.0, c_eps = 0.0;
  double mu[8] = {0, 0, 0, 0, 0, 0, 0, 0};  ///< mu[1..7] used
  ClosureLimits limits;
};

struct ClosureTensors {
  VWeight A[3][3];  ///< Lam^v(v_eps (x) v - (a v_eps^2 + b) I)
  VWeight B[3];     ///< Lam^v(v (v_eps^2 - c))
  double ortho_residual = 0.0;  ///< max |<A_ij or B_i, g>| over kernel g
};

struct AbResult {
  double a_eps, b_eps, det_D;
};

/// 2x2 normalization system solved from exact 1-D Plancherel brackets.
AbResult compute_ab(const BasisSet& basis);
/// Scalar equation c <v_i v_i_eps> = <v_i v_i_eps v_eps^2>.
double compute_c(const BasisSet& basis);
/// mu1..mu7 from (a, b, c) and (c0, c1, c2).
ClosureConstants compute_closure_constants(const BasisSet& basis);

/// Band-limited tensors with kernel-orthogonality verified (residual <= 1e-12
/// expected; throws above 1e-9, which would mean inconsistent constants).
ClosureTensors build_tensors(const BasisSet& basis, const ClosureConstants& consts);

}  // namespace kll
