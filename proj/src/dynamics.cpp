#include "kll/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kll {

void KineticParams::validate() const {
  if (!(epsilon > 0.0) || !(nu_star > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("KineticParams: epsilon, nu_star, kappa must be positive");
}

SpectralField transport_term(const SpectralField& f) {
  SpectralField out(f.band);
  for (int axis = 0; axis < 3; ++axis)
    out += multiply_by_sawtooth(derivative_x(f, axis), axis, f.band);
  return out;
}

namespace {

struct NonlinearTerms {
  SpectralField micro_sq;  ///< L(Lam(f^2))
  SpectralField cubic;     ///< Lam(f^3)
};

NonlinearTerms nonlinear_terms(const SpectralField& f, const BasisSet& basis) {
  const Band ext = f.band.product_extension(2);
  SpectralField sq_ext = product(f, f, ext);
  NonlinearTerms t{micro_project(cutoff(sq_ext, f.band), basis),
                   product(sq_ext, f, f.band)};
  return t;
}

}  // namespace

SpectralField rhs_nonstiff(const SpectralField& f, const KineticParams& p,
                           const BasisSet& basis) {
  p.validate();
  NonlinearTerms nl = nonlinear_terms(f, basis);
  SpectralField out = transport_term(f);
  out *= -1.0 / p.epsilon;
  out.axpy(p.kappa / (p.epsilon * p.nu_star), nl.micro_sq);
  out.axpy(-p.kappa * p.kappa / p.nu_star, nl.cubic);
  return out;
}

SpectralField rhs(const SpectralField& f, const KineticParams& p, const BasisSet& basis) {
  SpectralField out = rhs_nonstiff(f, p, basis);
  out.axpy(-1.0 / (p.epsilon * p.epsilon * p.nu_star), micro_project(f, basis));
  return out;
}

SpectralField relax_exact(const SpectralField& f, double tau, const BasisSet& basis) {
  // P + e^{-tau} L = e^{-tau} I + (1 - e^{-tau}) P
  const double decay = std::exp(-tau);
  SpectralField out = macro_project(f, basis).projected;
  out *= (1.0 - decay);
  out.axpy(decay, f);
  return out;
}

namespace {

template <typename Rhs>
SpectralField rk4_generic(const SpectralField& f, double dt, const Rhs& deriv) {
  SpectralField k1 = deriv(f);
  SpectralField y = f;
  y.axpy(0.5 * dt, k1);
  SpectralField k2 = deriv(y);
  y = f;
  y.axpy(0.5 * dt, k2);
  SpectralField k3 = deriv(y);
  y = f;
  y.axpy(dt, k3);
  SpectralField k4 = deriv(y);
  SpectralField out = f;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  return out;
}

void check_state(const SpectralField& f, const char* where, double t) {
  if (f.finite() && f.max_abs() < 1e50) return;
  std::ostringstream os;
  os << where << ": state not finite at t = " << t << " (cubic blow-up or misconfiguration)";
  throw std::runtime_error(os.str());
}

}  // namespace

SpectralField step_imex(const SpectralField& f, double dt, const KineticParams& p,
                        const BasisSet& basis) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
  const double tau = dt / (2.0 * p.epsilon * p.epsilon * p.nu_star);
  SpectralField g = relax_exact(f, tau, basis);
  g = rk4_generic(g, dt, [&](const SpectralField& y) { return rhs_nonstiff(y, p, basis); });
  return relax_exact(g, tau, basis);
}

SpectralField step_rk4(const SpectralField& f, double dt, const KineticParams& p,
                       const BasisSet& basis) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  return rk4_generic(f, dt, [&](const SpectralField& y) { return rhs(y, p, basis); });
}

double imex_dt_cap(double requested, const KineticParams& p, const Band& band,
                   double cap_frac) {
  // The explicit substep carries the convectively stiff (1/eps) transport and
  // quadratic terms: |lambda| <= 3 pi (nx-1)/eps with |v_j| <= 1/2, and RK4
  // tolerates |lambda| dt <= 2.8.
  const double lam = 3.0 * 3.14159265358979323846 * std::max(1, band.nx - 1) / p.epsilon;
  return std::min(requested, cap_frac * 2.8 / lam);
}

EnergyReport energy_report(const TrajectoryRecord& traj, const KineticParams& p,
                           double tol_energy) {
  EnergyReport rep;
  const double scale = 1.0 / (p.epsilon * p.epsilon * p.nu_star);
  rep.min_margin = 0.0;
  rep.margin.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    double m = traj.initial_energy_sq - traj.energy_sq[k] -
               scale * traj.cumulative_dissipation[k];
    rep.margin.push_back(m);
    rep.min_margin = std::min(rep.min_margin, m);
  }
  rep.worst_violation = std::max(0.0, -rep.min_margin);
  rep.ok = rep.min_margin >= -tol_energy;
  return rep;
}

IntegrateResult integrate(const SpectralField& f0, double t_end, double dt,
                          Integrator kind, const KineticParams& p, const BasisSet& basis,
                          int series_every, const StepObserver& obs) {
  p.validate();
  if (!(dt > 0.0) || !(t_end >= 0.0))
    throw std::invalid_argument("integrate: dt > 0 and t_end >= 0 required");
  if (series_every < 1) series_every = 1;

  IntegrateResult res;
  res.final_state = f0;
  TrajectoryRecord& tr = res.traj;

  auto record = [&](double t, double d2) {
    tr.times.push_back(t);
    tr.energy_sq.push_back(std::pow(x_norm(res.final_state).h1, 2));
    tr.dissipation_sq.push_back(d2);
  };

  double d2 = std::pow(x_norm(micro_project(f0, basis)).h1, 2);
  tr.initial_energy_sq = std::pow(x_norm(f0).h1, 2);
  record(0.0, d2);
  tr.cumulative_dissipation.push_back(0.0);
  if (obs) obs(0, 0.0, res.final_state);

  double t = 0.0;
  double cum = 0.0;
  double d2_prev = d2;
  int step = 0;
  while (t < t_end - 1e-15 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - t);
    res.final_state = (kind == Integrator::Imex) ? step_imex(res.final_state, h, p, basis)
                                                 : step_rk4(res.final_state, h, p, basis);
    t += h;
    ++step;
    check_state(res.final_state, "integrate", t);
    double d2_now = std::pow(x_norm(micro_project(res.final_state, basis)).h1, 2);
    cum += 0.5 * h * (d2_prev + d2_now);
    d2_prev = d2_now;
    record(t, d2_now);
    tr.cumulative_dissipation.push_back(cum);
    if (obs && (step % series_every == 0 || t >= t_end - 1e-15))
      obs(step, t, res.final_state);
  }
  res.steps_taken = step;
  return res;
}

SpectralField picard_solve(const SpectralField& f0, double T, int iterations,
                           double quad_dt, const KineticParams& p, const BasisSet& basis,
                           PicardReport* report) {
  p.validate();
  if (!(T > 0.0) || !(quad_dt > 0.0) || iterations < 1)
    throw std::invalid_argument("picard_solve: T, quad_dt > 0 and iterations >= 1");
  const int K = std::max(1, int(std::ceil(T / quad_dt - 1e-12)));
  const double h = T / K;

  // g_0 is the constant-in-time sequence start
  std::vector<SpectralField> prev(K + 1, f0), next(K + 1, f0);
  PicardReport rep;

  for (int j = 0; j < iterations; ++j) {
    // F(g_prev) on the grid, then cumulative trapezoid
    std::vector<SpectralField> F;
    F.reserve(K + 1);
    for (int k = 0; k <= K; ++k) F.push_back(rhs(prev[k], p, basis));
    SpectralField cum(f0.band);
    next[0] = f0;
    for (int k = 1; k <= K; ++k) {
      cum.axpy(0.5 * h, F[k - 1]);
      cum.axpy(0.5 * h, F[k]);
      next[k] = f0;
      next[k] += cum;
      check_state(next[k], "picard_solve", k * h);
    }
    double diff = 0.0;
    for (int k = 0; k <= K; ++k) {
      SpectralField d = next[k];
      d -= prev[k];
      diff = std::max(diff, x_norm(d).h1);
    }
    rep.diffs.push_back(diff);
    if (rep.diffs.size() >= 2) {
      double prev_diff = rep.diffs[rep.diffs.size() - 2];
      rep.ratios.push_back(prev_diff > 0.0 ? diff / prev_diff : 0.0);
    }
    std::swap(prev, next);
    if (diff == 0.0) break;
  }

  // contraction check: once past the first couple of iterations the quotients
  // must stay below 1 (the proof regime gives <= 1/2)
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    if (rep.ratios[i] >= 1.0 && rep.diffs[i + 1] > 1e-14) {
      rep.contracting = false;
      break;
    }
  }
  if (report) *report = rep;
  if (!rep.contracting) {
    std::ostringstream os;
    os << "picard_solve: iteration not contracting; ratios:";
    for (double r : rep.ratios) os << " " << r;
    throw std::runtime_error(os.str());
  }
  return prev[K];
}

}  // namespace kll
