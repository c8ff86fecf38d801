/// @file hydro.hpp
/// @brief Moment extraction, the rewritten conservation system and its exact
///        residuals, Boussinesq diagnostics, cubic forcing terms, the
///        reference incompressible limit solver, and the Knudsen sweep.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kll/closure.hpp"
#include "kll/dynamics.hpp"
#include "kll/projections.hpp"

namespace kll {

/// Scale between the unit-normalized theta moment stored in MacroState and
/// the summed-weight normalization used by the conservation-form equations
/// and forcing tables: theta_sum = sqrt(3) * theta.
inline double theta_sum_scale() { return BasisSet::e2_sum_norm(); }

MacroState extract_moments(const SpectralField& f, const BasisSet& basis);

/// Residual L2 norms of the three conservation-form identities
///   eps d_t rho + (1/c1) div u            = -(eps k^2/nu_*) <f^3>
///   eps d_t u_i + c1 sum_j d_j <v_i^eps v_j f> = -(eps c1 k^2/nu_*) <v_i^eps f^3>
///   eps d_t th  + sum_j d_j <e2 v_j f>    = -(eps k^2/nu_*) <e2 f^3>
/// evaluated with d_t-moments read from rhs_f. These are exact identities of
/// the truncated system; anything above rounding is an implementation bug.
struct MomentResiduals {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double max() const { return std::max(mass, std::max(momentum, energy)); }
};
MomentResiduals moment_residuals(const SpectralField& f, const SpectralField& rhs_f,
                                 const KineticParams& p, const BasisSet& basis);

/// eps_form = ||grad(mu2 rho + mu1 theta_sum)||_L2,
/// limit_form = ||grad(3 sqrt5 rho + 2 theta_sum)||_L2.
struct BoussinesqResidual {
  double eps_form = 0.0;
  double limit_form = 0.0;
};
BoussinesqResidual boussinesq_residual(const MacroState& macro, const ClosureConstants& cc);

struct ForcingSet {
  std::array<XField, 3> F;  ///< cubic velocity forcing
  XField G;                 ///< cubic temperature forcing
  XField E;                 ///< cubic density forcing
  std::array<XField, 3> H;  ///< (sqrt3 kappa/5) d_i (u_i^2)
  std::array<XField, 3> J;  ///< -(1/10) d_i^2 u_i
};
/// Assembles the cubic-moment tables with alias-free products on the x-band.
ForcingSet forcing_terms(const MacroState& macro, const KineticParams& p);

/// Norms of the rewritten-system remainders (diagnostic only; the remainders
/// need not vanish at finite eps).
struct RewrittenResiduals {
  double o0 = 0.0;  ///< mass equation
  double o1 = 0.0;  ///< momentum equation
  double o1_sol = 0.0;  ///< Helmholtz-projected momentum remainder
  double o2 = 0.0;  ///< temperature equation
};
RewrittenResiduals rewritten_residuals(const SpectralField& f, const SpectralField& rhs_f,
                                       const KineticParams& p, const BasisSet& basis,
                                       const ClosureConstants& cc);

// --- reference limit solver -------------------------------------------------

struct NsfState {
  std::array<XField, 3> u;  ///< divergence-free
  XField theta_tilde;
  double nu = 1.0 / 12.0;
};

/// Forcing sampled at one time: velocity components and the tilde equation's
/// scalar right-hand side.
struct NsfForcing {
  std::array<XField, 3> fu;
  XField ftheta;
};

/// One step by Fourier pseudo-spectral method: exact integrating factor for
/// the diffusion pair (nu, (291/133) nu), explicit dealiased advection
/// (Heun), Helmholtz projection after each stage.
NsfState nsf_step(const NsfState& s, double dt, const NsfForcing* forcing = nullptr);

/// sum of 1/2 ||u||^2 over components (for decay-rate checks).
double nsf_kinetic_energy(const NsfState& s);

// --- initial data -------------------------------------------------------------

struct MacroData {
  XField rho0;
  std::array<XField, 3> u0;
  XField theta0;
};
MacroData zero_macro_data(const Band& band);

/// Lift (rho0, u0, theta0) to the band-limited kinetic state
/// f0 = Lam(rho0) + Lam(2 sqrt3 v . u0) + Lam(6 sqrt5 (|v|^2 - 1/4) theta0).
SpectralField lift_macro_data(const MacroData& data, const Band& band);

/// Divergence-free u0 plus the band-exact Boussinesq constraint
/// (nonmean rho0 modes replaced by -(12/c2) theta0).
void make_well_prepared(MacroData& data, const BasisSet& basis);

// --- Knudsen sweep ----------------------------------------------------------

struct LimitStudyConfig {
  Band band{2, 2};
  double nu_star = 1.0;
  double kappa = 1.7320508075688772935;
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  double t_end = 0.5;
  double dt = 1e-3;  ///< shared across the sweep (capped for the smallest eps)
  int series_every = 10;
  MacroData data;        ///< initial macro fields (lifted per eps)
  bool well_prepared = true;
  int threads = 1;
};

struct SweepMember {
  double epsilon = 0.0;
  double s1 = 0.0;  ///< (int_0^T D^2)^{1/2}
  double s2 = 0.0;  ///< ||div u||_{L2_t H^-1}
  double s3 = 0.0;  ///< Boussinesq limit form at T
  double energy_margin_min = 0.0;
  double max_identity_residual = 0.0;
  std::vector<double> times;                         ///< series times
  std::vector<std::array<XField, 3>> pu_series;      ///< P(u) snapshots
  std::vector<NsfForcing> forcing_series;            ///< ingested-forcing samples
  std::vector<MacroState> macro_series;
};

struct LimitStudyReport {
  std::vector<SweepMember> members;
  std::vector<double> s4;  ///< sup_t ||P(u^eps_i) - P(u^eps_{i+1})||_L2
  double s1_slope = 0.0;   ///< log-log fit of s1 against eps
  bool s1_slope_ok = false;
  bool s2_decreasing = false, s3_decreasing = false, s4_decreasing = false;
  bool pass = false;
  double dt_used = 0.0;
};

LimitStudyReport limit_study(const LimitStudyConfig& cfg);

/// JSON summary ({per_eps: ..., slopes: ..., pass: bool}) and the raw CSV.
std::string limit_report_json(const LimitStudyReport& rep);
std::string limit_report_csv(const LimitStudyReport& rep);

}  // namespace kll
