/// @file harness.hpp
/// @brief Run configuration, initial-data construction, orchestration of
///        simulate / limit-study / nsf runs, and the CLI entry point.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kll/hydro.hpp"

namespace kll {

struct ExplicitMode {
  std::string target;  ///< rho | u1 | u2 | u3 | theta
  Mode3 n{0, 0, 0};
  double re = 0.0, im = 0.0;
};

struct RunConfig {
  // band: explicit radii, or the eps-scaling rule N = ceil(1/eps^gamma)
  int n_x = 2, n_v = 2;
  bool knudsen_scaling = false;
  double gamma = 0.05;
  // kinetic parameters (kappa defaults to sqrt 3; nu = nu_star/12 derived)
  double epsilon = 0.2, nu_star = 1.0, kappa = 1.7320508075688772935;
  // integrator
  std::string integrator = "imex";  ///< imex | rk4 | picard
  double dt = 1e-3, t_end = 0.5, quad_dt = 1e-3;
  int picard_iterations = 12;
  // initial data
  std::string preset = "single_mode_shear";  ///< or thermal_bump | random_seeded | explicit
  double amplitude = 0.1;
  std::uint64_t seed = 1234;
  bool well_prepared = false;
  std::vector<ExplicitMode> modes;
  // outputs
  std::string out_dir = "out";
  int checkpoint_every = 0;  ///< in series records; 0 disables
  int series_every = 1;
  bool write_forcing = false;
  // tolerances
  double tol_energy = 1e-8;   ///< relative to E(f0)^2
  double tol_identity = 1e-9;
  // sweep
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  int threads = 1;

  Band band() const;
  KineticParams params() const;
  void validate() const;
};

/// Parse + schema-validate a JSON config file; unknown keys are errors.
RunConfig load_config(const std::string& path);
/// Apply one `key=value` override with dotted paths (e.g. params.epsilon=0.1).
void apply_override(RunConfig& cfg, const std::string& kv);
std::string config_to_json(const RunConfig& cfg);

/// Macro fields for the configured preset / explicit modes.
MacroData initial_macro_data(const RunConfig& cfg, const BasisSet& basis);

/// The lifted, band-limited, real initial field. Throws (listing the modes)
/// if an explicit mode lies outside the band.
SpectralField load_initial(const RunConfig& cfg, const BasisSet& basis);

struct SimulateOutcome {
  bool ok = true;
  double min_margin = 0.0;
  double max_identity_residual = 0.0;
  double final_energy_sq = 0.0;
  std::string failure;
};
SimulateOutcome run_simulate(const RunConfig& cfg);

int run_cli(int argc, const char* const* argv);

// forcing-series persistence (one CSV row per record; columns are the
// flattened spectral coefficients, see header row)
void write_forcing_csv(const std::string& path, const Band& band,
                       const std::vector<double>& times,
                       const std::vector<NsfForcing>& series);
struct ForcingSeries {
  std::vector<double> times;
  std::vector<NsfForcing> series;
};
ForcingSeries read_forcing_csv(const std::string& path);

/// Piecewise-linear sample of a recorded forcing series at time t.
NsfForcing interpolate_forcing(const ForcingSeries& fs, double t);

}  // namespace kll
