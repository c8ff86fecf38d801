#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kll/dynamics.hpp"
#include "kll/hydro.hpp"

using namespace kll;

namespace {

SpectralField constant_field(const Band& b, double c) {
  SpectralField f(b);
  f.set({0, 0, 0}, {0, 0, 0}, {c, 0.0});
  return f;
}

double ode_exact(double f0, double t, const KineticParams& p) {
  return f0 / std::sqrt(1.0 + 2.0 * p.kappa * p.kappa * f0 * f0 * t / p.nu_star);
}

KineticParams params(double eps = 0.2) {
  KineticParams p;
  p.epsilon = eps;
  return p;
}

}  // namespace

TEST_CASE("rhs of a constant state is the pure cubic decay") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  const double c = 0.4;
  SpectralField f = constant_field(b, c);
  SpectralField r = rhs(f, p, basis);
  double want = -p.kappa * p.kappa / p.nu_star * c * c * c;
  CHECK(std::abs(r.at({0, 0, 0}, {0, 0, 0}) - Complex{want, 0.0}) < 1e-14);
  SpectralField r2 = r;
  r2.set({0, 0, 0}, {0, 0, 0}, {0.0, 0.0});
  CHECK(r2.max_abs() < 1e-14);
}

TEST_CASE("rhs linearization: microscopic homogeneous data relaxes at rate 1/(eps^2 nu)") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  // a spatially homogeneous microscopic profile
  SpectralField g(b);
  g.set({0, 0, 0}, {1, 1, 0}, {0.3, 0.1});
  g.set({0, 0, 0}, {-1, -1, 0}, {0.3, -0.1});
  g = micro_project(g, basis);
  const double rate = 1.0 / (p.epsilon * p.epsilon * p.nu_star);

  auto defect = [&](double a) {
    SpectralField fa = g;
    fa *= a;
    SpectralField r = rhs(fa, p, basis);
    r.axpy(a * rate, g);  // r + (1/(eps^2 nu)) f should be O(a^2)
    return r.max_abs();
  };
  double d1 = defect(1e-3), d2 = defect(5e-4);
  CHECK(d1 < 1e-4);
  CHECK(d2 < 0.3 * d1);  // quadratic in the amplitude (ratio 1/4 expected)
}

TEST_CASE("relaxation exponential: kernel identity and semigroup property") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  // purely macroscopic state: relaxation is the identity
  MacroData data = zero_macro_data(b);
  data.u0[0].set({0, 1, 0}, Complex{0.0, -0.05});
  data.u0[0].set({0, -1, 0}, Complex{0.0, 0.05});
  SpectralField fm = lift_macro_data(data, b);
  SpectralField relaxed = relax_exact(fm, 0.7, basis);
  SpectralField d = relaxed;
  d -= fm;
  CHECK(d.max_abs() < 1e-15);

  SpectralField f = random_field(b, 3);
  SpectralField two = relax_exact(relax_exact(f, 0.3, basis), 0.45, basis);
  SpectralField one = relax_exact(f, 0.75, basis);
  SpectralField diff = two;
  diff -= one;
  CHECK(diff.max_abs() < 1e-14);
}

TEST_CASE("microscopic homogeneous data: one IMEX step matches the linear flow") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  SpectralField g(b);
  g.set({0, 0, 0}, {0, 1, 1}, {1.0, -0.4});
  g.set({0, 0, 0}, {0, -1, -1}, {1.0, 0.4});
  g = micro_project(g, basis);
  const double a = 1e-5;
  g *= a;
  const double dt = 1e-3;
  SpectralField stepped = step_imex(g, dt, p, basis);
  SpectralField want = g;
  want *= std::exp(-dt / (p.epsilon * p.epsilon * p.nu_star));
  SpectralField d = stepped;
  d -= want;
  CHECK(d.max_abs() < 1e-12 * a + 1e-18);
}

TEST_CASE("homogeneous cubic decay: both steppers hit the closed form") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  const double f0 = 0.5, T = 0.2, dt = 1e-3;
  for (Integrator kind : {Integrator::Imex, Integrator::Rk4}) {
    IntegrateResult res = integrate(constant_field(b, f0), T, dt, kind, p, basis, 1000);
    double got = res.final_state.at({0, 0, 0}, {0, 0, 0}).real();
    CHECK(std::abs(got - ode_exact(f0, T, p)) < 1e-9);
  }
}

TEST_CASE("cross-validation: imex and rk4 agree at second order") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params(0.3);
  SpectralField f0 = random_field(b, 91, 0.05);
  auto gap = [&](double dt) {
    SpectralField a = integrate(f0, 0.02, dt, Integrator::Imex, p, basis, 1000).final_state;
    SpectralField c = integrate(f0, 0.02, dt, Integrator::Rk4, p, basis, 1000).final_state;
    a -= c;
    return a.max_abs();
  };
  double g1 = gap(2e-3), g2 = gap(1e-3);
  CHECK(g2 < 0.4 * g1);  // O(dt^2) difference
  CHECK(g1 < 1e-5);
}

TEST_CASE("zero field is a fixed point of every path") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  SpectralField z(b);
  CHECK(step_rk4(z, 1e-3, p, basis).max_abs() == 0.0);
  CHECK(step_imex(z, 1e-3, p, basis).max_abs() == 0.0);
  CHECK(picard_solve(z, 0.05, 5, 1e-2, p, basis).max_abs() == 0.0);
}

TEST_CASE("reality and band closure hold along trajectories") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  SpectralField f = random_field(b, 17, 0.05);
  IntegrateResult res = integrate(f, 0.05, 1e-3, Integrator::Imex, p, basis, 1000);
  CHECK(res.final_state.reality_defect() < 1e-12);
}

TEST_CASE("picard: fixed point at zero data, ODE case, stepper cross-check") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();

  // constant data converges to the closed form
  const double f0 = 0.5, T = 0.05;
  PicardReport rep;
  SpectralField fT = picard_solve(constant_field(b, f0), T, 20, 2.5e-4, p, basis, &rep);
  CHECK(std::abs(fT.at({0, 0, 0}, {0, 0, 0}).real() - ode_exact(f0, T, p)) < 1e-6);
  CHECK(rep.contracting);
  // in the proof regime the quotients settle at or below 1/2
  bool tail_small = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i)
    if (rep.diffs[i + 1] > 1e-13 && rep.ratios[i] > 0.5) tail_small = false;
  CHECK(tail_small);

  // random small data: Picard matches the IMEX reference as both refine
  const double Tc = 0.02;
  SpectralField r0 = random_field(b, 23, 0.02);
  SpectralField ref = integrate(r0, Tc, 4e-5, Integrator::Imex, p, basis, 100000).final_state;
  SpectralField coarse = picard_solve(r0, Tc, 8, 1e-3, p, basis);
  SpectralField fine = picard_solve(r0, Tc, 14, 8e-5, p, basis);
  SpectralField dc = coarse, df = fine;
  dc -= ref;
  df -= ref;
  CHECK(x_norm(df).h1 < x_norm(dc).h1);
  CHECK(x_norm(df).h1 < 1e-6);
}

TEST_CASE("energy report: zero data, macroscopic data, refinement") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();

  IntegrateResult z = integrate(SpectralField(b), 0.05, 1e-3, Integrator::Imex, p, basis, 10);
  EnergyReport ez = energy_report(z.traj, p, 1e-12);
  for (double m : ez.margin) CHECK(m == 0.0);

  MacroData data = zero_macro_data(b);
  data.u0[0].set({0, 1, 0}, Complex{0.0, -0.05});
  data.u0[0].set({0, -1, 0}, Complex{0.0, 0.05});
  SpectralField f0 = lift_macro_data(data, b);
  IntegrateResult res = integrate(f0, 0.1, 1e-3, Integrator::Imex, p, basis, 10);
  EnergyReport er = energy_report(res.traj, p, 1e-8 * res.traj.initial_energy_sq);
  CHECK(er.ok);
}

TEST_CASE("moment identities of the truncated system hold to rounding") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params();
  for (int trial = 0; trial < 5; ++trial) {
    SpectralField f = random_field(b, 300 + trial, 0.2);
    SpectralField rf = rhs(f, p, basis);
    MomentResiduals mr = moment_residuals(f, rf, p, basis);
    CHECK(mr.max() < 1e-12);
  }
}

TEST_CASE("non-contracting horizons are reported as errors") {
  Band b(2, 2);
  BasisSet basis = build_basis(b);
  KineticParams p = params(0.05);  // stiff: T far outside the contraction regime
  SpectralField f = random_field(b, 5, 0.5);
  CHECK_THROWS(picard_solve(f, 2.0, 8, 0.05, p, basis));
}
