/// @file field.hpp
/// @brief Band-limited spectral fields on T^3_x x Omega_v and on T^3_x alone,
///        with the exact algebra performed on them: cutoffs, derivatives,
///        alias-free products, sawtooth multiplication, norms, v-moments.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "kll/band.hpp"

namespace kll {

using Complex = std::complex<double>;

/// Sparse function of v alone (weights like e0, e1_i, e2, A_ij, B_i).
/// Entries are (v-mode, coefficient) pairs, sorted, with zero coefficients
/// dropped; real-valued functions keep conjugate symmetry.
struct VWeight {
  std::vector<std::pair<Mode3, Complex>> entries;

  void add(const Mode3& m, Complex c);
  void compress(double drop_tol = 0.0);
  VWeight& operator*=(double s);
  VWeight& axpy(double s, const VWeight& other);  ///< *this += s * other
  Complex coeff(const Mode3& m) const;

  /// Exact inner product <w, g>_v = integral of w * g over Omega
  /// (both real-valued, band-limited).
  double dot(const VWeight& g) const;
  double l2_norm() const;
};

struct XField;

/// Complex Fourier coefficients of f(x, v) over the kept modes, stored dense
/// row-major over (n1, n2, n3, m1, m2, m3), each index in -(N-1)..(N-1);
/// x-modes outside the sphere are stored as zeros.
struct SpectralField {
  Band band;
  std::vector<Complex> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Band& b);

  std::size_t index(const Mode3& n, const Mode3& m) const {
    const int R = band.nx - 1, S = band.nv - 1;
    const int X = band.x_side(), V = band.v_side();
    std::size_t ix = (std::size_t(n[0] + R) * X + (n[1] + R)) * X + (n[2] + R);
    std::size_t iv = (std::size_t(m[0] + S) * V + (m[1] + S)) * V + (m[2] + S);
    return ix * (std::size_t(V) * V * V) + iv;
  }
  Complex at(const Mode3& n, const Mode3& m) const {
    if (!band.keeps_x(n) || !band.keeps_v(m)) return {0.0, 0.0};
    return coeffs[index(n, m)];
  }
  void set(const Mode3& n, const Mode3& m, Complex c);

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  SpectralField& axpy(double s, const SpectralField& o);  ///< *this += s*o

  double max_abs() const;
  bool finite() const;
  /// max |c(n,m) - conj(c(-n,-m))| over kept modes
  double reality_defect() const;
  void enforce_reality();
};

/// Function of x alone (rho, u_i, theta, forcing components).
struct XField {
  Band band;  ///< only nx/xshape meaningful
  std::vector<Complex> coeffs;

  XField() = default;
  explicit XField(const Band& b);

  std::size_t index(const Mode3& n) const {
    const int R = band.nx - 1, X = band.x_side();
    return (std::size_t(n[0] + R) * X + (n[1] + R)) * X + (n[2] + R);
  }
  Complex at(const Mode3& n) const {
    if (!band.keeps_x(n)) return {0.0, 0.0};
    return coeffs[index(n)];
  }
  void set(const Mode3& n, Complex c);

  XField& operator+=(const XField& o);
  XField& operator-=(const XField& o);
  XField& operator*=(double s);
  XField& axpy(double s, const XField& o);

  double l2_norm() const;
  double h1_norm() const;
  double hm1_norm() const;  ///< Fourier multiplier (1 + 4pi^2|k|^2)^{-1/2}
  double max_abs() const;
  bool finite() const;
  double reality_defect() const;
  void enforce_reality();
};

// --- mode iteration -------------------------------------------------------

/// All kept x-modes of a band (mask applied), deterministic order.
/// Cached per band; the reference stays valid for the process lifetime.
const std::vector<Mode3>& x_modes(const Band& b);
/// All v-modes of the cube (cached).
const std::vector<Mode3>& v_modes(const Band& b);

// --- spectral_core operations ----------------------------------------------

/// Restriction to `band`: coefficients inside copied, all others dropped.
SpectralField cutoff(const SpectralField& f, const Band& band);
XField cutoff_x(const XField& f, const Band& band);

/// Coefficient (n,m) multiplied by 2*pi*i*n_axis; band unchanged. axis in 0..2.
SpectralField derivative_x(const SpectralField& f, int axis);
XField derivative_x(const XField& f, int axis);

/// Exact truncated convolution: Fourier coefficients of the pointwise product
/// f*g restricted to `out`. Direct convolution; no aliasing.
SpectralField product(const SpectralField& f, const SpectralField& g, const Band& out);
XField product(const XField& f, const XField& g, const Band& out);

/// Lambda(v_axis * f) computed with the analytic sawtooth coefficients,
/// truncated to `out`. Exact because f is band-limited.
SpectralField multiply_by_sawtooth(const SpectralField& f, int axis, const Band& out);

struct XNorms {
  double l2 = 0.0;
  double h1 = 0.0;  ///< the energy functional E(f)
};
/// Plancherel-exact L^2 and H^1_x L^2_v norms.
XNorms x_norm(const SpectralField& f);

/// integral over Omega of f * weight dv as a function of x.
/// weight depends on v only; rejects nothing (weights are VWeight by type).
XField v_moment(const SpectralField& f, const VWeight& weight);

/// f += a(x) * w(v) (outer-product lift), exact on f's band.
void add_outer(SpectralField& f, const XField& a, const VWeight& w, double scale = 1.0);

/// <f * w1 * w2>-style helper: moment against the exact product of a sparse
/// weight with the true (uncut) sawtooth of the given axis.
XField v_moment_sawtooth(const SpectralField& f, int axis, const VWeight& weight);

// --- grid evaluation (test oracles, Bernstein checks) ----------------------

/// Evaluate the x-part at one v-collocation of ... not needed; instead:
/// evaluate f on a uniform (Gx^3 x Gv^3) grid by direct summation.
/// Intended for small bands and quadrature oracles only.
std::vector<double> evaluate_on_grid(const SpectralField& f, int gx, int gv);
std::vector<double> evaluate_on_grid(const XField& f, int gx);

// --- random fields ----------------------------------------------------------

/// Deterministic random real band-limited field (conjugate symmetry imposed),
/// coefficients O(amplitude).
SpectralField random_field(const Band& b, std::uint64_t seed, double amplitude = 1.0);
XField random_xfield(const Band& b, std::uint64_t seed, double amplitude = 1.0);

}  // namespace kll
