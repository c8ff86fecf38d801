/// @file dynamics.hpp
/// @brief Right-hand side of the band-limited relaxation kinetic equation,
///        stiff-aware integrators (Strang IMEX with the exact projection
///        exponential, classical RK4), the Picard local solver, and the
///        energy-inequality monitor.
#pragma once

#include <functional>
#include <vector>

#include "kll/projections.hpp"

namespace kll {

struct KineticParams {
  double epsilon = 0.2;   ///< Knudsen number
  double nu_star = 1.0;   ///< relaxation scale; nu = nu_star/12
  double kappa = 1.7320508075688772935;  ///< nonlinearity strength, default sqrt 3

  double nu() const { return nu_star / 12.0; }
  void validate() const;
};

/// d_t f = -(1/eps) Lam(v . grad_x f) - 1/(eps^2 nu_*) L f
///         + kappa/(eps nu_*) L(Lam(f^2)) - kappa^2/nu_* Lam(f^3).
/// Every product alias-free; the result satisfies Lam(rhs) = rhs.
SpectralField rhs(const SpectralField& f, const KineticParams& p, const BasisSet& basis);

/// rhs without the linear relaxation term (the explicit part of the splitting).
SpectralField rhs_nonstiff(const SpectralField& f, const KineticParams& p,
                           const BasisSet& basis);

/// Lam(v . grad_x f), exact.
SpectralField transport_term(const SpectralField& f);

/// Exact relaxation flow over time tau/(eps^2 nu_*):
/// exp(-tau L) = P + e^{-tau} L since L^2 = L.
SpectralField relax_exact(const SpectralField& f, double tau, const BasisSet& basis);

/// Strang: half-step exact relaxation, full RK4 step on the remaining terms,
/// half-step relaxation. Order 2; unconditionally stable in the relaxation.
SpectralField step_imex(const SpectralField& f, double dt, const KineticParams& p,
                        const BasisSet& basis);

/// Classical 4-stage explicit step on the full rhs; caller must keep dt below
/// the stiff bound ~ 2.8 eps^2 nu_*.
SpectralField step_rk4(const SpectralField& f, double dt, const KineticParams& p,
                       const BasisSet& basis);

/// Largest dt the configuration supports: min(cap_frac*eps, cap_frac*1/(3 nv),
/// requested). The 1/eps terms are convectively stiff only.
double imex_dt_cap(double requested, const KineticParams& p, const Band& band,
                   double cap_frac = 0.5);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> energy_sq;               ///< E(f)^2 at recorded times
  std::vector<double> dissipation_sq;          ///< D(f)^2
  std::vector<double> cumulative_dissipation;  ///< trapezoid of D^2 over [0,t]
  double initial_energy_sq = 0.0;
};

struct EnergyReport {
  std::vector<double> margin;  ///< E(f0)^2 - E^2(t) - (1/eps^2 nu_*) int D^2
  double min_margin = 0.0;
  double worst_violation = 0.0;  ///< max(0, -min margin)
  bool ok = true;                ///< no margin below -tol_energy
};
EnergyReport energy_report(const TrajectoryRecord& traj, const KineticParams& p,
                           double tol_energy);

enum class Integrator { Imex, Rk4 };

/// Called at every recorded point (including t = 0).
using StepObserver = std::function<void(int step, double t, const SpectralField& f)>;

struct IntegrateResult {
  SpectralField final_state;
  TrajectoryRecord traj;
  int steps_taken = 0;
};

/// March f0 to t_end with fixed dt (last step shortened to hit t_end exactly),
/// recording the energy pair every step and invoking the observer every
/// `series_every` steps. Aborts with a diagnostic on NaN/overflow.
IntegrateResult integrate(const SpectralField& f0, double t_end, double dt,
                          Integrator kind, const KineticParams& p, const BasisSet& basis,
                          int series_every = 1, const StepObserver& obs = nullptr);

struct PicardReport {
  std::vector<double> diffs;   ///< sup_t ||g_{j+1} - g_j||_X per iteration
  std::vector<double> ratios;  ///< successive quotients
  bool contracting = true;
};

/// The induction map of the local-existence argument: iterate
/// g_{j+1}(t) = g_0 + int_0^t rhs(g_j) ds with composite-trapezoid quadrature
/// at resolution quad_dt; returns g_J(T). Throws (with the ratio history in
/// the message) if the iteration stops contracting.
SpectralField picard_solve(const SpectralField& f0, double T, int iterations,
                           double quad_dt, const KineticParams& p, const BasisSet& basis,
                           PicardReport* report = nullptr);

}  // namespace kll
