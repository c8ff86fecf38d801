#include "kll/projections.hpp"

#include <stdexcept>

namespace kll {

MacroState extract_macro(const SpectralField& f, const BasisSet& basis) {
  // weights must fit inside the field's band for the moments to be exact
  if (f.band.nv < basis.band.nv)
    throw std::invalid_argument("extract_macro: field v-band smaller than the basis band");
  MacroState ms;
  ms.rho = v_moment(f, basis.e0);
  for (int i = 0; i < 3; ++i) ms.u[i] = v_moment(f, basis.e1[i]);
  ms.theta = v_moment(f, basis.e2);
  return ms;
}

SpectralField macro_reconstruct(const MacroState& ms, const BasisSet& basis, const Band& band) {
  SpectralField p(band);
  add_outer(p, ms.rho, basis.e0);
  for (int i = 0; i < 3; ++i) add_outer(p, ms.u[i], basis.e1[i]);
  add_outer(p, ms.theta, basis.e2);
  return p;
}

MacroProjection macro_project(const SpectralField& f, const BasisSet& basis) {
  MacroProjection out;
  out.moments = extract_macro(f, basis);
  out.projected = macro_reconstruct(out.moments, basis, f.band);
  return out;
}

SpectralField micro_project(const SpectralField& f, const BasisSet& basis) {
  SpectralField l = f;
  l -= macro_project(f, basis).projected;
  return l;
}

XField divergence(const std::array<XField, 3>& u) {
  XField d = derivative_x(u[0], 0);
  d += derivative_x(u[1], 1);
  d += derivative_x(u[2], 2);
  return d;
}

HelmholtzSplit helmholtz_project(const std::array<XField, 3>& u) {
  HelmholtzSplit out;
  for (int i = 0; i < 3; ++i) {
    out.p_part[i] = XField(u[i].band);
    out.q_part[i] = XField(u[i].band);
  }
  for (const auto& n : x_modes(u[0].band)) {
    const double k2 = double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2];
    Complex uh[3] = {u[0].at(n), u[1].at(n), u[2].at(n)};
    if (k2 == 0.0) {  // mean flow is divergence-free
      for (int i = 0; i < 3; ++i) out.p_part[i].set(n, uh[i]);
      continue;
    }
    Complex udotk = uh[0] * double(n[0]) + uh[1] * double(n[1]) + uh[2] * double(n[2]);
    for (int i = 0; i < 3; ++i) {
      Complex grad = udotk * (double(n[i]) / k2);
      out.p_part[i].set(n, uh[i] - grad);
      out.q_part[i].set(n, grad);
    }
  }
  return out;
}

}  // namespace kll
