#include "kll/closure.hpp"

#include <cmath>
#include <stdexcept>

namespace kll {

AbResult compute_ab(const BasisSet& basis) {
  const int nv = basis.band.nv;
  const double S2 = sum_saw_sq(nv);          // <v_i_eps v_i> = <v_i_eps, v_i_eps>
  const double U = sum_vsq_sq(nv);           // <Lam(v_i^2), Lam(v_i^2)>
  const double T = bracket_vvs_vsq(nv);      // <v_i_eps v_i Lam(v_i^2)>
  // D = [[3U + 6<Lam v_i^2, Lam v_j^2>, 3<Lam v_i^2>], [3<Lam v_i^2>, 1]]
  // with <Lam v_i^2, Lam v_j^2> = 1/144 and <Lam v_i^2> = 1/12 exactly.
  const double det = (3.0 * U + 6.0 / 144.0) - 9.0 / 144.0;  // = 3U - 1/48
  if (!(std::abs(det) > 0.0)) throw std::logic_error("compute_ab: singular D");
  const double r1 = T + 2.0 * S2 / 12.0;  // <v v_eps, Lam v_i^2> + 2 <v v_eps, Lam v_j^2>
  const double r2 = S2;                   // <v_i_eps v_i>
  // inversion formula of the 2x2 system
  const double a = (r1 - (3.0 / 12.0) * r2) / det;
  const double b = (-(3.0 / 12.0) * r1 + (3.0 * U + 6.0 / 144.0) * r2) / det;
  return {a, b, det};
}

double compute_c(const BasisSet& basis) {
  const int nv = basis.band.nv;
  const double S2 = sum_saw_sq(nv);
  if (!(S2 > 0.0)) throw std::logic_error("compute_c: vanishing denominator");
  // <v_i v_i_eps v_eps^2> = <v v_eps Lam(v_i^2)> + 2 <v v_eps> <Lam(v_j^2)>
  const double num = bracket_vvs_vsq(nv) + 2.0 * S2 / 12.0;
  return num / S2;
}

ClosureConstants compute_closure_constants(const BasisSet& basis) {
  ClosureConstants cc;
  const AbResult ab = compute_ab(basis);
  cc.a_eps = ab.a_eps;
  cc.b_eps = ab.b_eps;
  cc.det_D = ab.det_D;
  cc.c_eps = compute_c(basis);
  const double c0 = basis.c0, c1 = basis.c1, c2 = basis.c2;
  cc.mu[1] = cc.a_eps * c1 / c2;
  cc.mu[2] = c1 * (3.0 * cc.a_eps * c0 / c2 + cc.b_eps);
  cc.mu[5] = c2 * cc.c_eps - 3.0 * c0;
  cc.mu[3] = cc.mu[5] / c1;
  cc.mu[4] = cc.mu[2] / c1 + cc.mu[1] * cc.mu[3];
  cc.mu[6] = 1.0 / (1.0 + 2.0 * std::sqrt(5.0) * cc.mu[5] / 15.0);
  cc.mu[7] = cc.mu[2] + cc.mu[1] * cc.mu[5];
  return cc;
}

namespace {

// Lam^{v_i}(v_i_eps * v_i): 1-D coefficients sum_{|p|<N} s(p) s(m-p), |m| < N.
VWeight saw_times_true_saw(int axis, int nv) {
  VWeight w;
  for (int m = -(nv - 1); m < nv; ++m) {
    Complex acc{0.0, 0.0};
    for (int p = -(nv - 1); p < nv; ++p) acc += sawtooth_coeff(p) * sawtooth_coeff(m - p);
    if (acc != Complex{0.0, 0.0}) {
      Mode3 mm{0, 0, 0};
      mm[axis] = m;
      w.add(mm, acc);
    }
  }
  w.compress();
  return w;
}

// Lam^{v_i}(v_i * Lam(v_i^2)): sum_{|q|<N} w(q) s(m-q), |m| < N.
VWeight true_saw_times_vsq(int axis, int nv) {
  VWeight w;
  for (int m = -(nv - 1); m < nv; ++m) {
    Complex acc{0.0, 0.0};
    for (int q = -(nv - 1); q < nv; ++q) acc += vsq_coeff(q) * sawtooth_coeff(m - q);
    if (acc != Complex{0.0, 0.0}) {
      Mode3 mm{0, 0, 0};
      mm[axis] = m;
      w.add(mm, acc);
    }
  }
  w.compress();
  return w;
}

// v_i_eps (x) g(v_j) for sparse 1-D factors on distinct axes.
VWeight tensor_line_product(int axis_a, const std::vector<std::pair<int, Complex>>& fa,
                            int axis_b, const std::vector<std::pair<int, Complex>>& fb) {
  VWeight w;
  for (const auto& [p, ca] : fa)
    for (const auto& [q, cb] : fb) {
      Mode3 mm{0, 0, 0};
      mm[axis_a] = p;
      mm[axis_b] = q;
      w.add(mm, ca * cb);
    }
  w.compress();
  return w;
}

std::vector<std::pair<int, Complex>> line_sawtooth(int nv) {
  std::vector<std::pair<int, Complex>> out;
  for (int m = -(nv - 1); m < nv; ++m)
    if (m != 0) out.emplace_back(m, sawtooth_coeff(m));
  return out;
}

std::vector<std::pair<int, Complex>> line_vsq(int nv) {
  std::vector<std::pair<int, Complex>> out;
  for (int m = -(nv - 1); m < nv; ++m) out.emplace_back(m, vsq_coeff(m));
  return out;
}

}  // namespace

ClosureTensors build_tensors(const BasisSet& basis, const ClosureConstants& consts) {
  const int nv = basis.band.nv;
  ClosureTensors t;

  // v_eps^2 = sum_k Lam(v_k^2) as one sparse weight
  VWeight vsq_sum;
  for (int k = 0; k < 3; ++k) vsq_sum.axpy(1.0, basis.vsq_eps[k]);

  const auto saw_line = line_sawtooth(nv);
  const auto vsq_line = line_vsq(nv);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        VWeight w = saw_times_true_saw(i, nv);
        w.axpy(-consts.a_eps, vsq_sum);
        w.add({0, 0, 0}, {-consts.b_eps, 0.0});
        w.compress();
        t.A[i][j] = std::move(w);
      } else {
        t.A[i][j] = tensor_line_product(i, saw_line, j, saw_line);
      }
    }
    // B_i = Lam(v_i v_eps^2) - c * v_i_eps
    VWeight w = true_saw_times_vsq(i, nv);
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      w.axpy(1.0, tensor_line_product(i, saw_line, j, vsq_line));
    }
    w.axpy(-consts.c_eps, basis.v_eps[i]);
    w.compress();
    t.B[i] = std::move(w);
  }

  const VWeight* kernel[5] = {&basis.e0, &basis.v_eps[0], &basis.v_eps[1], &basis.v_eps[2],
                              &vsq_sum};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      for (const auto* g : kernel) worst = std::max(worst, std::abs(t.A[i][j].dot(*g)));
    for (const auto* g : kernel) worst = std::max(worst, std::abs(t.B[i].dot(*g)));
  }
  t.ortho_residual = worst;
  if (worst > 1e-9)
    throw std::logic_error("build_tensors: kernel orthogonality residual exceeds 1e-9");
  return t;
}

}  // namespace kll
