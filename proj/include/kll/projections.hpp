/// @file projections.hpp
/// @brief Macroscopic projection P, microscopic projection L = I - P, and
///        the spectral Helmholtz projection on T^3_x.
#pragma once

#include <array>

#include "kll/basis.hpp"
#include "kll/field.hpp"

namespace kll {

/// Spectral moments of f against the orthonormal basis {e0, e1_i, e2}.
struct MacroState {
  XField rho;
  std::array<XField, 3> u;
  XField theta;
};

/// Moments (rho, u, theta) and the reconstructed field
/// P(f) = rho e0 + u . e1 + theta e2.
struct MacroProjection {
  MacroState moments;
  SpectralField projected;
};

MacroState extract_macro(const SpectralField& f, const BasisSet& basis);
MacroProjection macro_project(const SpectralField& f, const BasisSet& basis);

/// L(f) = f - P(f); idempotent, self-adjoint, commutes with d_x and cutoff.
SpectralField micro_project(const SpectralField& f, const BasisSet& basis);

/// Reconstruct rho e0 + u . e1 + theta e2 on the given band.
SpectralField macro_reconstruct(const MacroState& ms, const BasisSet& basis, const Band& band);

/// Mode-wise Helmholtz split: p_part divergence-free (k = 0 mode assigned to
/// it: constants are divergence-free), q_part the gradient remainder.
struct HelmholtzSplit {
  std::array<XField, 3> p_part;
  std::array<XField, 3> q_part;
};
HelmholtzSplit helmholtz_project(const std::array<XField, 3>& u);

XField divergence(const std::array<XField, 3>& u);

}  // namespace kll
