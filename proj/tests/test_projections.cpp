#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kll/projections.hpp"

using namespace kll;

namespace {

SpectralField lift_weight(const Band& b, const VWeight& w, Complex xmode_amp = {1.0, 0.0},
                          Mode3 n = {0, 0, 0}) {
  XField a(Band(b.nx, 1, b.xshape));
  a.set(n, xmode_amp);
  Mode3 nn{-n[0], -n[1], -n[2]};
  if (nn != n) a.set(nn, std::conj(xmode_amp));
  SpectralField f(b);
  add_outer(f, a, w);
  return f;
}

double field_diff(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return d.max_abs();
}

}  // namespace

TEST_CASE("macro_project: basis elements reproduce themselves") {
  Band b(2, 3);
  BasisSet basis = build_basis(b);
  SpectralField f = lift_weight(b, basis.e2);
  MacroProjection mp = macro_project(f, basis);
  CHECK(std::abs(mp.moments.theta.at({0, 0, 0}) - Complex{1.0, 0.0}) < 1e-13);
  CHECK(mp.moments.rho.max_abs() < 1e-14);
  for (int i = 0; i < 3; ++i) CHECK(mp.moments.u[i].max_abs() < 1e-14);
  CHECK(field_diff(mp.projected, f) < 1e-13);
}

TEST_CASE("macro_project reproduces anything in span{1, v_eps, v_eps^2}") {
  Band b(2, 3);
  BasisSet basis = build_basis(b);
  VWeight vsq_sum;
  for (int i = 0; i < 3; ++i) vsq_sum.axpy(1.0, basis.vsq_eps[i]);

  SpectralField f = lift_weight(b, basis.e0, {0.3, 0.1}, {1, 0, 0});
  f += lift_weight(b, basis.v_eps[0], {-0.2, 0.05}, {0, 1, 0});
  f += lift_weight(b, basis.v_eps[2], {0.1, 0.0}, {0, 0, 0});
  f += lift_weight(b, vsq_sum, {0.15, -0.2}, {1, 1, 0});
  MacroProjection mp = macro_project(f, basis);
  CHECK(field_diff(mp.projected, f) < 1e-13);
  CHECK(micro_project(f, basis).max_abs() < 1e-13);
}

TEST_CASE("orthogonal energy split in both norms") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  for (int trial = 0; trial < 10; ++trial) {
    SpectralField f = random_field(b, 100 + trial);
    MacroProjection mp = macro_project(f, basis);
    SpectralField l = micro_project(f, basis);
    double lhs_l2 = std::pow(x_norm(f).l2, 2);
    double rhs_l2 = std::pow(mp.moments.rho.l2_norm(), 2) +
                    std::pow(mp.moments.theta.l2_norm(), 2) + std::pow(x_norm(l).l2, 2);
    for (int i = 0; i < 3; ++i) rhs_l2 += std::pow(mp.moments.u[i].l2_norm(), 2);
    CHECK(std::abs(lhs_l2 - rhs_l2) < 1e-12 * std::max(1.0, lhs_l2));

    double lhs_h1 = std::pow(x_norm(f).h1, 2);
    double rhs_h1 = std::pow(mp.moments.rho.h1_norm(), 2) +
                    std::pow(mp.moments.theta.h1_norm(), 2) + std::pow(x_norm(l).h1, 2);
    for (int i = 0; i < 3; ++i) rhs_h1 += std::pow(mp.moments.u[i].h1_norm(), 2);
    CHECK(std::abs(lhs_h1 - rhs_h1) < 1e-12 * std::max(1.0, lhs_h1));
  }
}

TEST_CASE("micro_project: kernel, idempotency, contraction, self-adjointness") {
  Band b(2, 3);
  BasisSet basis = build_basis(b);
  SpectralField e1f = lift_weight(b, basis.e1[1]);
  CHECK(micro_project(e1f, basis).max_abs() < 1e-14);

  SpectralField f = random_field(b, 7);
  SpectralField l1 = micro_project(f, basis);
  SpectralField l2 = micro_project(l1, basis);
  CHECK(field_diff(l1, l2) < 1e-13);
  CHECK(x_norm(l1).h1 <= x_norm(f).h1 + 1e-13);
  CHECK(x_norm(l1).l2 <= x_norm(f).l2 + 1e-13);

  // self-adjoint: <L f, g> = <f, L g> in L^2(x,v)
  SpectralField g = random_field(b, 9);
  auto inner = [](const SpectralField& a, const SpectralField& c) {
    Complex acc{0.0, 0.0};
    for (const auto& n : x_modes(a.band))
      for (const auto& m : v_modes(a.band))
        acc += a.at(n, m) * std::conj(c.at(n, m));
    return acc.real();
  };
  CHECK(std::abs(inner(micro_project(f, basis), g) - inner(f, micro_project(g, basis))) <
        1e-12);
}

TEST_CASE("cutoff commutes with the macroscopic projection") {
  Band big(3, 3), small(2, 3);
  BasisSet basis = build_basis(small);
  SpectralField h = random_field(big, 21);
  SpectralField a = cutoff(macro_project(h, basis).projected, small);
  SpectralField b = macro_project(cutoff(h, small), basis).projected;
  CHECK(field_diff(a, b) < 1e-13);
}

TEST_CASE("d_x commutes with the microscopic projection") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  SpectralField f = random_field(b, 33);
  SpectralField lhs = derivative_x(micro_project(f, basis), 1);
  SpectralField rhs = micro_project(derivative_x(f, 1), basis);
  CHECK(field_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("Helmholtz projection: gradients, solenoidal fields, orthogonality") {
  Band xb(2, 1);
  // u = grad(sin 2 pi x1): pure gradient -> p_part = 0
  std::array<XField, 3> grad{XField(xb), XField(xb), XField(xb)};
  grad[0].set({1, 0, 0}, Complex{M_PI, 0.0});
  grad[0].set({-1, 0, 0}, Complex{M_PI, 0.0});
  HelmholtzSplit hs = helmholtz_project(grad);
  for (int i = 0; i < 3; ++i) CHECK(hs.p_part[i].max_abs() < 1e-14);

  // u = (sin 2 pi x2, 0, 0): already divergence-free
  std::array<XField, 3> shear{XField(xb), XField(xb), XField(xb)};
  shear[0].set({0, 1, 0}, Complex{0.0, -0.5});
  shear[0].set({0, -1, 0}, Complex{0.0, 0.5});
  HelmholtzSplit hs2 = helmholtz_project(shear);
  for (int i = 0; i < 3; ++i) {
    XField d = hs2.p_part[i];
    d -= shear[i];
    CHECK(d.max_abs() < 1e-15);
    CHECK(hs2.q_part[i].max_abs() < 1e-15);
  }

  // random: P + Q = I, ||p||^2 + ||q||^2 = ||u||^2, div p = 0, idempotent
  for (int trial = 0; trial < 20; ++trial) {
    std::array<XField, 3> u;
    for (int i = 0; i < 3; ++i) u[i] = random_xfield(xb, 500 + 3 * trial + i);
    HelmholtzSplit s = helmholtz_project(u);
    double nu = 0, np = 0, nq = 0;
    for (int i = 0; i < 3; ++i) {
      nu += std::pow(u[i].l2_norm(), 2);
      np += std::pow(s.p_part[i].l2_norm(), 2);
      nq += std::pow(s.q_part[i].l2_norm(), 2);
      XField sum = s.p_part[i];
      sum += s.q_part[i];
      sum -= u[i];
      CHECK(sum.max_abs() < 1e-14);
    }
    CHECK(std::abs(np + nq - nu) < 1e-12 * std::max(1.0, nu));
    CHECK(divergence(s.p_part).max_abs() < 1e-13);
    HelmholtzSplit again = helmholtz_project(s.p_part);
    for (int i = 0; i < 3; ++i) {
      XField d = again.p_part[i];
      d -= s.p_part[i];
      CHECK(d.max_abs() < 1e-13);
    }
  }
}

TEST_CASE("d_x commutes with the Helmholtz projection") {
  Band xb(2, 1);
  std::array<XField, 3> u;
  for (int i = 0; i < 3; ++i) u[i] = random_xfield(xb, 77 + i);
  HelmholtzSplit s = helmholtz_project(u);
  std::array<XField, 3> du;
  for (int i = 0; i < 3; ++i) du[i] = derivative_x(u[i], 2);
  HelmholtzSplit sd = helmholtz_project(du);
  for (int i = 0; i < 3; ++i) {
    XField lhs = derivative_x(s.p_part[i], 2);
    lhs -= sd.p_part[i];
    CHECK(lhs.max_abs() < 1e-13);
  }
}

TEST_CASE("constant flows belong to the solenoidal part") {
  Band xb(2, 1);
  std::array<XField, 3> u{XField(xb), XField(xb), XField(xb)};
  u[0].set({0, 0, 0}, Complex{0.7, 0.0});
  HelmholtzSplit s = helmholtz_project(u);
  CHECK(std::abs(s.p_part[0].at({0, 0, 0}) - Complex{0.7, 0.0}) < 1e-16);
  for (int i = 0; i < 3; ++i) CHECK(s.q_part[i].max_abs() == 0.0);
}

TEST_CASE("Helmholtz projection is self-adjoint") {
  Band xb(2, 1);
  std::array<XField, 3> u, w;
  for (int i = 0; i < 3; ++i) {
    u[i] = random_xfield(xb, 301 + i);
    w[i] = random_xfield(xb, 311 + i);
  }
  auto inner = [](const std::array<XField, 3>& a, const std::array<XField, 3>& b) {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
      for (const auto& n : x_modes(a[i].band)) acc += a[i].at(n) * std::conj(b[i].at(n));
    return acc.real();
  };
  auto pu = helmholtz_project(u).p_part;
  auto pw = helmholtz_project(w).p_part;
  CHECK(std::abs(inner(pu, w) - inner(u, pw)) < 1e-13);
}
