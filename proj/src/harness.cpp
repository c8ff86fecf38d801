#include "kll/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "kll/checkpoint.hpp"
#include "kll/oracle.hpp"

namespace kll {

namespace fs = std::filesystem;
using nlohmann::json;

// --- RunConfig ---------------------------------------------------------------

Band RunConfig::band() const {
  if (knudsen_scaling) {
    int n = knudsen_scaling_radius(epsilon, gamma);
    return Band(n, std::max(2, n));
  }
  return Band(n_x, n_v);
}

KineticParams RunConfig::params() const {
  KineticParams p;
  p.epsilon = epsilon;
  p.nu_star = nu_star;
  p.kappa = kappa;
  return p;
}

void RunConfig::validate() const {
  params().validate();
  if (n_x < 1 || n_v < 2) throw std::invalid_argument("config: need n_x >= 1, n_v >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("config: t_end must be >= dt");
  if (!(quad_dt > 0.0)) throw std::invalid_argument("config: quad_dt must be positive");
  if (integrator != "imex" && integrator != "rk4" && integrator != "picard")
    throw std::invalid_argument("config: integrator must be imex, rk4 or picard");
  if (preset != "single_mode_shear" && preset != "thermal_bump" && preset != "random_seeded" &&
      preset != "explicit")
    throw std::invalid_argument("config: unknown preset " + preset);
  if (series_every < 1 || checkpoint_every < 0)
    throw std::invalid_argument("config: bad output cadence");
  if (!(tol_energy > 0.0) || !(tol_identity > 0.0))
    throw std::invalid_argument("config: tolerances must be positive");
}

namespace {

void expect_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") + it.key() + "' in " +
                                  where);
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  expect_keys(j, "top level",
              {"band", "params", "integrator", "initial", "outputs", "tolerances", "sweep"});
  RunConfig c;
  if (j.contains("band")) {
    const json& b = j["band"];
    expect_keys(b, "band", {"n_x", "n_v", "knudsen_scaling", "gamma"});
    c.n_x = b.value("n_x", c.n_x);
    c.n_v = b.value("n_v", c.n_v);
    c.knudsen_scaling = b.value("knudsen_scaling", c.knudsen_scaling);
    c.gamma = b.value("gamma", c.gamma);
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    expect_keys(p, "params", {"epsilon", "nu_star", "kappa"});
    c.epsilon = p.value("epsilon", c.epsilon);
    c.nu_star = p.value("nu_star", c.nu_star);
    c.kappa = p.value("kappa", c.kappa);
  }
  if (j.contains("integrator")) {
    const json& p = j["integrator"];
    expect_keys(p, "integrator", {"kind", "dt", "t_end", "quad_dt", "picard_iterations"});
    c.integrator = p.value("kind", c.integrator);
    c.dt = p.value("dt", c.dt);
    c.t_end = p.value("t_end", c.t_end);
    c.quad_dt = p.value("quad_dt", c.quad_dt);
    c.picard_iterations = p.value("picard_iterations", c.picard_iterations);
  }
  if (j.contains("initial")) {
    const json& p = j["initial"];
    expect_keys(p, "initial", {"preset", "amplitude", "seed", "well_prepared", "modes"});
    c.preset = p.value("preset", c.preset);
    c.amplitude = p.value("amplitude", c.amplitude);
    c.seed = p.value("seed", c.seed);
    c.well_prepared = p.value("well_prepared", c.well_prepared);
    if (p.contains("modes")) {
      for (const json& m : p["modes"]) {
        expect_keys(m, "initial.modes[]", {"target", "n", "re", "im"});
        ExplicitMode em;
        em.target = m.at("target").get<std::string>();
        auto nn = m.at("n");
        if (!nn.is_array() || nn.size() != 3)
          throw std::invalid_argument("config: mode n must be a 3-array");
        for (int d = 0; d < 3; ++d) em.n[d] = nn[d].get<int>();
        em.re = m.value("re", 0.0);
        em.im = m.value("im", 0.0);
        c.modes.push_back(em);
      }
    }
  }
  if (j.contains("outputs")) {
    const json& p = j["outputs"];
    expect_keys(p, "outputs", {"dir", "checkpoint_every", "series_every", "write_forcing"});
    c.out_dir = p.value("dir", c.out_dir);
    c.checkpoint_every = p.value("checkpoint_every", c.checkpoint_every);
    c.series_every = p.value("series_every", c.series_every);
    c.write_forcing = p.value("write_forcing", c.write_forcing);
  }
  if (j.contains("tolerances")) {
    const json& p = j["tolerances"];
    expect_keys(p, "tolerances", {"tol_energy", "tol_identity"});
    c.tol_energy = p.value("tol_energy", c.tol_energy);
    c.tol_identity = p.value("tol_identity", c.tol_identity);
  }
  if (j.contains("sweep")) {
    const json& p = j["sweep"];
    expect_keys(p, "sweep", {"eps_list", "threads"});
    if (p.contains("eps_list")) c.eps_list = p["eps_list"].get<std::vector<double>>();
    c.threads = p.value("threads", c.threads);
  }
  c.validate();
  return c;
}

void apply_override(RunConfig& cfg, const std::string& kv) {
  auto pos = kv.find('=');
  if (pos == std::string::npos)
    throw std::invalid_argument("override must be key=value: " + kv);
  const std::string key = kv.substr(0, pos);
  const std::string val = kv.substr(pos + 1);
  auto as_d = [&] { return std::stod(val); };
  auto as_i = [&] { return std::stoi(val); };
  auto as_b = [&] { return val == "true" || val == "1"; };

  if (key == "band.n_x") cfg.n_x = as_i();
  else if (key == "band.n_v") cfg.n_v = as_i();
  else if (key == "band.knudsen_scaling") cfg.knudsen_scaling = as_b();
  else if (key == "band.gamma") cfg.gamma = as_d();
  else if (key == "params.epsilon") cfg.epsilon = as_d();
  else if (key == "params.nu_star") cfg.nu_star = as_d();
  else if (key == "params.kappa") cfg.kappa = as_d();
  else if (key == "integrator.kind") cfg.integrator = val;
  else if (key == "integrator.dt") cfg.dt = as_d();
  else if (key == "integrator.t_end") cfg.t_end = as_d();
  else if (key == "integrator.quad_dt") cfg.quad_dt = as_d();
  else if (key == "integrator.picard_iterations") cfg.picard_iterations = as_i();
  else if (key == "initial.preset") cfg.preset = val;
  else if (key == "initial.amplitude") cfg.amplitude = as_d();
  else if (key == "initial.seed") cfg.seed = std::stoull(val);
  else if (key == "initial.well_prepared") cfg.well_prepared = as_b();
  else if (key == "outputs.dir") cfg.out_dir = val;
  else if (key == "outputs.checkpoint_every") cfg.checkpoint_every = as_i();
  else if (key == "outputs.series_every") cfg.series_every = as_i();
  else if (key == "outputs.write_forcing") cfg.write_forcing = as_b();
  else if (key == "tolerances.tol_energy") cfg.tol_energy = as_d();
  else if (key == "tolerances.tol_identity") cfg.tol_identity = as_d();
  else if (key == "sweep.threads") cfg.threads = as_i();
  else if (key == "sweep.eps_list") {
    cfg.eps_list.clear();
    std::stringstream ss(val);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.eps_list.push_back(std::stod(tok));
  } else {
    throw std::invalid_argument("unknown override key: " + key);
  }
  cfg.validate();
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["band"] = {{"n_x", c.n_x}, {"n_v", c.n_v}, {"knudsen_scaling", c.knudsen_scaling},
               {"gamma", c.gamma}};
  j["params"] = {{"epsilon", c.epsilon}, {"nu_star", c.nu_star}, {"kappa", c.kappa}};
  j["integrator"] = {{"kind", c.integrator},
                     {"dt", c.dt},
                     {"t_end", c.t_end},
                     {"quad_dt", c.quad_dt},
                     {"picard_iterations", c.picard_iterations}};
  json modes = json::array();
  for (const auto& m : c.modes)
    modes.push_back({{"target", m.target}, {"n", {m.n[0], m.n[1], m.n[2]}}, {"re", m.re},
                     {"im", m.im}});
  j["initial"] = {{"preset", c.preset}, {"amplitude", c.amplitude}, {"seed", c.seed},
                  {"well_prepared", c.well_prepared}, {"modes", modes}};
  j["outputs"] = {{"dir", c.out_dir}, {"checkpoint_every", c.checkpoint_every},
                  {"series_every", c.series_every}, {"write_forcing", c.write_forcing}};
  j["tolerances"] = {{"tol_energy", c.tol_energy}, {"tol_identity", c.tol_identity}};
  j["sweep"] = {{"eps_list", c.eps_list}, {"threads", c.threads}};
  return j.dump(2);
}

// --- initial data -------------------------------------------------------------

MacroData initial_macro_data(const RunConfig& cfg, const BasisSet& basis) {
  const Band band = cfg.band();
  MacroData d = zero_macro_data(band);
  const double A = cfg.amplitude;

  if (cfg.preset == "single_mode_shear") {
    // u0 = (A sin(2 pi x2), 0, 0); divergence-free and Boussinesq-trivial
    d.u0[0].set({0, 1, 0}, Complex{0.0, -0.5 * A});
    d.u0[0].set({0, -1, 0}, Complex{0.0, 0.5 * A});
  } else if (cfg.preset == "thermal_bump") {
    // theta0 = A cos(2 pi x1)
    d.theta0.set({1, 0, 0}, Complex{0.5 * A, 0.0});
    d.theta0.set({-1, 0, 0}, Complex{0.5 * A, 0.0});
  } else if (cfg.preset == "random_seeded") {
    Band xb(band.nx, 1, band.xshape);
    d.rho0 = random_xfield(xb, cfg.seed, A);
    for (int i = 0; i < 3; ++i) d.u0[i] = random_xfield(xb, cfg.seed + 1 + i, A);
    d.theta0 = random_xfield(xb, cfg.seed + 4, A);
  } else {  // explicit
    std::string outside;
    for (const auto& m : cfg.modes) {
      if (!band.keeps_x(m.n)) {
        outside += " (" + std::to_string(m.n[0]) + "," + std::to_string(m.n[1]) + "," +
                   std::to_string(m.n[2]) + ")";
        continue;
      }
      XField* target = nullptr;
      if (m.target == "rho") target = &d.rho0;
      else if (m.target == "u1") target = &d.u0[0];
      else if (m.target == "u2") target = &d.u0[1];
      else if (m.target == "u3") target = &d.u0[2];
      else if (m.target == "theta") target = &d.theta0;
      else throw std::invalid_argument("initial mode target must be rho|u1|u2|u3|theta");
      Complex c{m.re, m.im};
      target->set(m.n, target->at(m.n) + c);
      Mode3 nn{-m.n[0], -m.n[1], -m.n[2]};
      if (nn != m.n) target->set(nn, target->at(nn) + std::conj(c));
    }
    if (!outside.empty())
      throw std::invalid_argument("initial modes outside band:" + outside);
  }
  if (cfg.well_prepared) make_well_prepared(d, basis);
  return d;
}

SpectralField load_initial(const RunConfig& cfg, const BasisSet& basis) {
  return lift_macro_data(initial_macro_data(cfg, basis), cfg.band());
}

// --- forcing series CSV ----------------------------------------------------------

void write_forcing_csv(const std::string& path, const Band& band,
                       const std::vector<double>& times,
                       const std::vector<NsfForcing>& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  const auto modes = x_modes(Band(band.nx, 1, XShape::Sphere));
  os << "t";
  for (int c = 0; c < 4; ++c)
    for (const auto& n : modes)
      os << ",f" << c << "_" << n[0] << "_" << n[1] << "_" << n[2] << "_re"
         << ",f" << c << "_" << n[0] << "_" << n[1] << "_" << n[2] << "_im";
  os << "\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << times[k];
    for (int c = 0; c < 4; ++c) {
      const XField& f = (c < 3) ? series[k].fu[c] : series[k].ftheta;
      for (const auto& n : modes) {
        Complex z = f.at(n);
        os << "," << z.real() << "," << z.imag();
      }
    }
    os << "\n";
  }
}

ForcingSeries read_forcing_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty forcing csv");
  // infer the band from the column count: 1 + 4 * |modes| * 2
  std::size_t ncols = std::count(header.begin(), header.end(), ',') + 1;
  int nx = 1;
  for (; nx < 64; ++nx) {
    std::size_t m = x_modes(Band(nx, 1, XShape::Sphere)).size();
    if (1 + 8 * m == ncols) break;
  }
  if (nx >= 64) throw std::runtime_error("forcing csv: cannot infer band from header");
  const Band band(nx, 1, XShape::Sphere);
  const auto modes = x_modes(band);

  ForcingSeries out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != ncols) throw std::runtime_error("forcing csv: ragged row");
    out.times.push_back(vals[0]);
    NsfForcing nf;
    std::size_t idx = 1;
    for (int c = 0; c < 4; ++c) {
      XField f(band);
      for (const auto& n : modes) {
        f.set(n, Complex{vals[idx], vals[idx + 1]});
        idx += 2;
      }
      if (c < 3)
        nf.fu[c] = std::move(f);
      else
        nf.ftheta = std::move(f);
    }
    out.series.push_back(std::move(nf));
  }
  return out;
}

NsfForcing interpolate_forcing(const ForcingSeries& fs, double t) {
  if (fs.series.empty()) throw std::runtime_error("interpolate_forcing: empty series");
  if (t <= fs.times.front()) return fs.series.front();
  if (t >= fs.times.back()) return fs.series.back();
  std::size_t hi = 1;
  while (hi < fs.times.size() && fs.times[hi] < t) ++hi;
  const double t0 = fs.times[hi - 1], t1 = fs.times[hi];
  const double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
  NsfForcing out = fs.series[hi - 1];
  for (int c = 0; c < 3; ++c) {
    out.fu[c] *= (1.0 - w);
    out.fu[c].axpy(w, fs.series[hi].fu[c]);
  }
  out.ftheta *= (1.0 - w);
  out.ftheta.axpy(w, fs.series[hi].ftheta);
  return out;
}

// --- simulate ----------------------------------------------------------------------

namespace {

struct SeriesRow {
  int step;
  double t, res_mass, res_momentum, res_energy;
  double rho_l2, u_l2, theta_l2, divu_hm1, bouss_eps, bouss_limit;
  double o0, o1, o1_sol, o2;
};

void write_manifest(const RunConfig& cfg, const fs::path& dir) {
  json j;
  j["tool"] = "kll";
  j["version"] = "1.0.0";
  j["config"] = json::parse(config_to_json(cfg));
  j["seed"] = cfg.seed;
  std::ofstream os(dir / "manifest.json");
  os << j.dump(2) << "\n";
}

}  // namespace

SimulateOutcome run_simulate(const RunConfig& cfg) {
  cfg.validate();
  const Band band = cfg.band();
  const KineticParams p = cfg.params();
  BasisSet basis = build_basis(band);
  ClosureConstants cc = compute_closure_constants(basis);

  fs::create_directories(cfg.out_dir);
  write_manifest(cfg, cfg.out_dir);

  SpectralField f0 = load_initial(cfg, basis);
  const double e0_sq = std::pow(x_norm(f0).h1, 2);

  SimulateOutcome out;
  out.ok = true;

  if (cfg.integrator == "picard") {
    PicardReport rep;
    SpectralField fT =
        picard_solve(f0, cfg.t_end, cfg.picard_iterations, cfg.quad_dt, p, basis, &rep);
    json j;
    j["diffs"] = rep.diffs;
    j["ratios"] = rep.ratios;
    j["contracting"] = rep.contracting;
    j["final_energy_sq"] = std::pow(x_norm(fT).h1, 2);
    std::ofstream os(fs::path(cfg.out_dir) / "picard.json");
    os << j.dump(2) << "\n";
    save_checkpoint(fT, (fs::path(cfg.out_dir) / "final.kll1").string());
    out.final_energy_sq = std::pow(x_norm(fT).h1, 2);
    out.ok = rep.contracting;
    if (!out.ok) out.failure = "picard iteration not contracting";
    return out;
  }

  std::vector<SeriesRow> rows;
  std::vector<double> forcing_times;
  std::vector<NsfForcing> forcing_series;
  SpectralField last_state = f0;
  int ckpt_counter = 0;

  auto observer = [&](int step, double t, const SpectralField& f) {
    SpectralField rf = rhs(f, p, basis);
    MomentResiduals mr = moment_residuals(f, rf, p, basis);
    MacroState mac = extract_macro(f, basis);
    BoussinesqResidual br = boussinesq_residual(mac, cc);
    RewrittenResiduals rr = rewritten_residuals(f, rf, p, basis, cc);
    SeriesRow row;
    row.step = step;
    row.t = t;
    row.res_mass = mr.mass;
    row.res_momentum = mr.momentum;
    row.res_energy = mr.energy;
    row.rho_l2 = mac.rho.l2_norm();
    double us = 0.0;
    for (int i = 0; i < 3; ++i) us += std::pow(mac.u[i].l2_norm(), 2);
    row.u_l2 = std::sqrt(us);
    row.theta_l2 = mac.theta.l2_norm();
    row.divu_hm1 = divergence(mac.u).hm1_norm();
    row.bouss_eps = br.eps_form;
    row.bouss_limit = br.limit_form;
    row.o0 = rr.o0;
    row.o1 = rr.o1;
    row.o1_sol = rr.o1_sol;
    row.o2 = rr.o2;
    rows.push_back(row);
    out.max_identity_residual = std::max(out.max_identity_residual, mr.max());
    last_state = f;

    if (cfg.write_forcing) {
      ForcingSet fset = forcing_terms(mac, p);
      NsfForcing nf;
      for (int i = 0; i < 3; ++i) {
        nf.fu[i] = fset.F[i];
        nf.fu[i] *= -p.kappa * p.kappa / p.nu_star;
        nf.fu[i].axpy(1.0, fset.H[i]);
        nf.fu[i].axpy(p.nu_star, fset.J[i]);
      }
      auto pu = helmholtz_project(mac.u).p_part;
      XField K(mac.rho.band);
      for (int j = 0; j < 3; ++j)
        K.axpy(1.0, derivative_x(product(pu[j], mac.rho, mac.rho.band), j));
      nf.ftheta = K;
      nf.ftheta *= -97.0 * 1.7320508075688772935 * p.kappa * cc.mu[5] / 105.0;
      nf.ftheta.axpy(-p.kappa * p.kappa / p.nu_star, fset.G);
      nf.ftheta.axpy(cc.mu[5] * p.kappa * p.kappa / p.nu_star, fset.E);
      forcing_times.push_back(t);
      forcing_series.push_back(std::move(nf));
    }
    if (cfg.checkpoint_every > 0) {
      if (ckpt_counter % cfg.checkpoint_every == 0) {
        std::ostringstream name;
        name << "state_" << std::setw(6) << std::setfill('0') << step << ".kll1";
        save_checkpoint(f, (fs::path(cfg.out_dir) / name.str()).string());
      }
      ++ckpt_counter;
    }
  };

  Integrator kind = (cfg.integrator == "imex") ? Integrator::Imex : Integrator::Rk4;
  const double dt = (kind == Integrator::Imex) ? imex_dt_cap(cfg.dt, p, band) : cfg.dt;
  if (kind == Integrator::Rk4 && cfg.dt > 2.5 * p.epsilon * p.epsilon * p.nu_star)
    std::cerr << "warning: rk4 dt above the stiff stability bound ~2.8 eps^2 nu_*\n";

  IntegrateResult res;
  try {
    res = integrate(f0, cfg.t_end, dt, kind, p, basis, cfg.series_every, observer);
  } catch (const std::exception& e) {
    save_checkpoint(last_state, (fs::path(cfg.out_dir) / "abort.kll1").string());
    out.ok = false;
    out.failure = e.what();
    return out;
  }

  EnergyReport er = energy_report(res.traj, p, cfg.tol_energy * e0_sq);
  out.min_margin = er.min_margin;
  out.final_energy_sq = std::pow(x_norm(res.final_state).h1, 2);

  // series.csv: one row per recorded step (margin merged from the trajectory)
  {
    std::ofstream os(fs::path(cfg.out_dir) / "series.csv");
    os.precision(17);
    os << "t,energy_sq,dissipation_sq,cumulative_dissipation,energy_margin,"
          "res_mass,res_momentum,res_energy,rho_l2,u_l2,theta_l2,divu_hm1,"
          "bouss_eps,bouss_limit,o0_norm,o1_norm,o1_sol_norm,o2_norm\n";
    for (const auto& row : rows) {
      const int k = row.step;  // integrate records every step
      os << row.t << "," << res.traj.energy_sq[k] << "," << res.traj.dissipation_sq[k] << ","
         << res.traj.cumulative_dissipation[k] << "," << er.margin[k] << "," << row.res_mass
         << "," << row.res_momentum << "," << row.res_energy << "," << row.rho_l2 << ","
         << row.u_l2 << "," << row.theta_l2 << "," << row.divu_hm1 << "," << row.bouss_eps
         << "," << row.bouss_limit << "," << row.o0 << "," << row.o1 << "," << row.o1_sol
         << "," << row.o2 << "\n";
    }
  }
  if (cfg.write_forcing)
    write_forcing_csv((fs::path(cfg.out_dir) / "forcing.csv").string(), band, forcing_times,
                      forcing_series);
  save_checkpoint(res.final_state, (fs::path(cfg.out_dir) / "final.kll1").string());

  const bool identity_ok = out.max_identity_residual <= cfg.tol_identity;
  const bool reality_ok = res.final_state.reality_defect() <=
                          1e-10 * std::max(1.0, res.final_state.max_abs());
  if (!er.ok) {
    out.ok = false;
    out.failure = "energy inequality margin below tolerance";
  }
  if (!identity_ok) {
    out.ok = false;
    out.failure = "conservation-form identity residual above tol_identity";
  }
  if (!reality_ok) {
    out.ok = false;
    out.failure = "reality violated along the trajectory";
  }

  json summary;
  summary["initial_energy_sq"] = e0_sq;
  summary["final_energy_sq"] = out.final_energy_sq;
  summary["min_energy_margin"] = er.min_margin;
  summary["max_identity_residual"] = out.max_identity_residual;
  summary["steps"] = res.steps_taken;
  summary["dt"] = dt;
  summary["ok"] = out.ok;
  if (!out.ok) summary["failure"] = out.failure;
  std::ofstream os(fs::path(cfg.out_dir) / "summary.json");
  os << summary.dump(2) << "\n";
  return out;
}

// --- CLI ------------------------------------------------------------------------

namespace {

RunConfig config_from_cli(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  for (const auto& kv : overrides) apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

json constants_json(const Band& band) {
  BasisSet basis = build_basis(band);
  ClosureConstants cc = compute_closure_constants(basis);
  json j;
  j["band"] = {{"n_x", band.nx}, {"n_v", band.nv}};
  j["c0"] = basis.c0;
  j["c1"] = basis.c1;
  j["c2"] = basis.c2;
  j["gram_residual"] = basis.gram_residual;
  j["a"] = cc.a_eps;
  j["b"] = cc.b_eps;
  j["det_D"] = cc.det_D;
  j["c"] = cc.c_eps;
  for (int i = 1; i <= 7; ++i) j["mu" + std::to_string(i)] = cc.mu[i];
  const ClosureLimits& L = cc.limits;
  j["gap"]["a"] = std::abs(cc.a_eps - L.a);
  j["gap"]["b"] = std::abs(cc.b_eps - L.b);
  j["gap"]["det_D"] = std::abs(cc.det_D - L.det_D);
  j["gap"]["c"] = std::abs(cc.c_eps - L.c);
  j["gap"]["mu1"] = std::abs(cc.mu[1] - L.mu1);
  j["gap"]["mu2"] = std::abs(cc.mu[2] - L.mu2);
  j["gap"]["mu5"] = std::abs(cc.mu[5] - L.mu5);
  j["gap"]["c1"] = std::abs(basis.c1 - L.c1);
  j["gap"]["c2"] = std::abs(basis.c2 - L.c2);
  j["gap"]["c0"] = std::abs(basis.c0 - L.c0);
  return j;
}

std::string constants_csv(const json& j) {
  std::ostringstream os;
  os.precision(17);
  os << "symbol,value,limit,gap\n";
  auto row = [&](const char* name, double v, double lim) {
    os << name << "," << v << "," << lim << "," << std::abs(v - lim) << "\n";
  };
  ClosureLimits L;
  row("c0", j["c0"], L.c0);
  row("c1", j["c1"], L.c1);
  row("c2", j["c2"], L.c2);
  row("a", j["a"], L.a);
  row("b", j["b"], L.b);
  row("det_D", j["det_D"], L.det_D);
  row("c", j["c"], L.c);
  row("mu1", j["mu1"], L.mu1);
  row("mu2", j["mu2"], L.mu2);
  row("mu3", j["mu3"], L.mu3);
  row("mu4", j["mu4"], L.mu4);
  row("mu5", j["mu5"], L.mu5);
  row("mu6", j["mu6"], L.mu6);
  row("mu7", j["mu7"], L.mu7);
  return os.str();
}

int cmd_nsf(const RunConfig& cfg, const std::string& forcing_path) {
  const Band band = cfg.band();
  BasisSet basis = build_basis(band);
  MacroData data = initial_macro_data(cfg, basis);

  NsfState s;
  s.nu = cfg.nu_star / 12.0;
  s.u = helmholtz_project(data.u0).p_part;
  s.theta_tilde = data.theta0;
  s.theta_tilde.axpy(-2.0 * std::sqrt(5.0) / 5.0, data.rho0);

  ForcingSeries forcing;
  const bool with_forcing = !forcing_path.empty();
  if (with_forcing) forcing = read_forcing_csv(forcing_path);

  fs::create_directories(cfg.out_dir);
  write_manifest(cfg, cfg.out_dir);
  std::ofstream os(fs::path(cfg.out_dir) / "nsf_series.csv");
  os.precision(17);
  os << "t,kinetic_energy,u_l2,theta_tilde_l2,div_u_l2\n";

  double t = 0.0;
  auto emit = [&]() {
    double un = 0.0;
    for (int i = 0; i < 3; ++i) un += std::pow(s.u[i].l2_norm(), 2);
    os << t << "," << nsf_kinetic_energy(s) << "," << std::sqrt(un) << ","
       << s.theta_tilde.l2_norm() << "," << divergence(s.u).l2_norm() << "\n";
  };
  emit();
  int step = 0;
  while (t < cfg.t_end - 1e-15) {
    const double h = std::min(cfg.dt, cfg.t_end - t);
    if (with_forcing) {
      NsfForcing nf = interpolate_forcing(forcing, t + 0.5 * h);
      s = nsf_step(s, h, &nf);
    } else {
      s = nsf_step(s, h, nullptr);
    }
    t += h;
    if (++step % cfg.series_every == 0 || t >= cfg.t_end - 1e-15) emit();
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"kll: band-limited kinetic relaxation solver and its incompressible limit"};
  app.require_subcommand(1);

  std::string config_path, out_override, forcing_path, series_path;
  std::vector<std::string> overrides;
  int nv_opt = 64, nx_opt = 2, threads_opt = 0;
  std::string eps_list_str;
  double er_eps = 0.2, er_nustar = 1.0, er_tol = 1e-8;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--override", overrides, "key=value override (repeatable)");
    sub->add_option("--out", out_override, "output directory");
  };

  CLI::App* c_constants = app.add_subcommand("constants", "basis + closure constants vs limits");
  c_constants->add_option("--n-v", nv_opt, "v half-width");
  c_constants->add_option("--n-x", nx_opt, "x radius");
  c_constants->add_option("--out", out_override, "also write constants.csv here");

  CLI::App* c_verify = app.add_subcommand("verify-closure", "exact coefficient table");
  c_verify->add_option("--out", out_override, "also write closure_table.csv here");

  CLI::App* c_sim = app.add_subcommand("simulate", "one kinetic trajectory with reports");
  add_common(c_sim);

  CLI::App* c_limit = app.add_subcommand("limit-study", "Knudsen sweep with slope fits");
  add_common(c_limit);
  c_limit->add_option("--eps-list", eps_list_str, "comma-separated decreasing eps values");
  c_limit->add_option("--threads", threads_opt, "sweep worker threads");

  CLI::App* c_nsf = app.add_subcommand("nsf", "reference limit-system run");
  add_common(c_nsf);
  c_nsf->add_option("--forcing", forcing_path, "ingest a kinetic forcing series CSV");

  CLI::App* c_energy = app.add_subcommand("energy-report", "re-analyze a series CSV");
  c_energy->add_option("--series", series_path, "series.csv path")->required();
  c_energy->add_option("--epsilon", er_eps, "Knudsen number of the run");
  c_energy->add_option("--nu-star", er_nustar, "relaxation scale of the run");
  c_energy->add_option("--tol", er_tol, "relative margin tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_constants->parsed()) {
      json j = constants_json(Band(nx_opt, nv_opt));
      std::cout << j.dump(2) << "\n";
      if (!out_override.empty()) {
        fs::create_directories(out_override);
        std::ofstream cs(fs::path(out_override) / "constants.csv");
        cs << constants_csv(j);
        std::ofstream js(fs::path(out_override) / "constants.json");
        js << j.dump(2) << "\n";
      }
      return 0;
    }
    if (c_verify->parsed()) {
      OracleReport rep = verify_closure_tables();
      std::string csv = oracle_report_csv(rep);
      std::cout << csv;
      if (!out_override.empty()) {
        fs::create_directories(out_override);
        std::ofstream cs(fs::path(out_override) / "closure_table.csv");
        cs << csv;
      }
      std::cout << (rep.all_pass ? "all rows pass" : "FAILURES present") << " ("
                << rep.rows.size() << " rows, " << rep.n_flag << " flagged)\n";
      return rep.all_pass ? 0 : 1;
    }
    if (c_sim->parsed()) {
      RunConfig cfg = config_from_cli(config_path, overrides);
      if (!out_override.empty()) cfg.out_dir = out_override;
      SimulateOutcome out = run_simulate(cfg);
      if (!out.ok) {
        std::cerr << "invariant failure: " << out.failure << "\n";
        return 1;
      }
      return 0;
    }
    if (c_limit->parsed()) {
      RunConfig cfg = config_from_cli(config_path, overrides);
      if (!out_override.empty()) cfg.out_dir = out_override;
      if (!eps_list_str.empty()) apply_override(cfg, "sweep.eps_list=" + eps_list_str);
      if (threads_opt > 0) cfg.threads = threads_opt;
      else if (const char* env = std::getenv("KLL_THREADS")) cfg.threads = std::atoi(env);

      LimitStudyConfig lcfg;
      lcfg.band = cfg.band();
      lcfg.nu_star = cfg.nu_star;
      lcfg.kappa = cfg.kappa;
      lcfg.eps_list = cfg.eps_list;
      lcfg.t_end = cfg.t_end;
      lcfg.dt = cfg.dt;
      lcfg.series_every = cfg.series_every;
      lcfg.threads = cfg.threads;
      BasisSet basis = build_basis(lcfg.band);
      RunConfig icfg = cfg;
      icfg.well_prepared = true;
      lcfg.data = initial_macro_data(icfg, basis);
      LimitStudyReport rep = limit_study(lcfg);

      fs::create_directories(cfg.out_dir);
      write_manifest(cfg, cfg.out_dir);
      std::ofstream js(fs::path(cfg.out_dir) / "limit_report.json");
      js << limit_report_json(rep) << "\n";
      std::ofstream cs(fs::path(cfg.out_dir) / "sweep.csv");
      cs << limit_report_csv(rep);
      std::cout << limit_report_json(rep) << "\n";
      double worst_identity = 0.0;
      for (const auto& m : rep.members)
        worst_identity = std::max(worst_identity, m.max_identity_residual);
      if (worst_identity > cfg.tol_identity) {
        std::cerr << "invariant failure: identity residual " << worst_identity << "\n";
        return 1;
      }
      return 0;  // non-monotone trends are flagged in the report, not fatal
    }
    if (c_nsf->parsed()) {
      RunConfig cfg = config_from_cli(config_path, overrides);
      if (!out_override.empty()) cfg.out_dir = out_override;
      return cmd_nsf(cfg, forcing_path);
    }
    if (c_energy->parsed()) {
      std::ifstream is(series_path);
      if (!is) throw std::invalid_argument("cannot open " + series_path);
      std::string header;
      std::getline(is, header);
      TrajectoryRecord traj;
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() < 4) throw std::invalid_argument("series csv: too few columns");
        traj.times.push_back(vals[0]);
        traj.energy_sq.push_back(vals[1]);
        traj.dissipation_sq.push_back(vals[2]);
        traj.cumulative_dissipation.push_back(vals[3]);
      }
      if (traj.times.empty()) throw std::invalid_argument("series csv: no rows");
      traj.initial_energy_sq = traj.energy_sq.front();
      KineticParams p;
      p.epsilon = er_eps;
      p.nu_star = er_nustar;
      EnergyReport er = energy_report(traj, p, er_tol * traj.initial_energy_sq);
      json j;
      j["min_margin"] = er.min_margin;
      j["worst_violation"] = er.worst_violation;
      j["ok"] = er.ok;
      std::cout << j.dump(2) << "\n";
      return er.ok ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace kll
