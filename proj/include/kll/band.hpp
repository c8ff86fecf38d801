/// @file band.hpp
/// @brief Double Fourier band on T^3_x x Omega_v: spherical in x, cube in v.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kll {

using Mode3 = std::array<int, 3>;

/// Shape of the kept x-mode set. Primary fields use the spherical bound
/// |n| < n_x (Euclidean, strict); cube bands appear only as intermediates
/// of alias-free products, where the Minkowski sum of two spheres must be
/// held without clipping.
enum class XShape : std::uint8_t { Sphere, Cube };

struct Band {
  int nx = 1;  ///< keep x-modes n with |n| < nx (strict)
  int nv = 1;  ///< keep v-modes m with |m_j| < nv per coordinate (strict)
  XShape xshape = XShape::Sphere;

  Band() = default;
  Band(int nx_, int nv_, XShape s = XShape::Sphere) : nx(nx_), nv(nv_), xshape(s) {
    if (nx < 1 || nv < 1) throw std::invalid_argument("Band: radii must be >= 1");
  }

  int x_side() const { return 2 * nx - 1; }
  int v_side() const { return 2 * nv - 1; }

  bool keeps_x(const Mode3& n) const {
    for (int d = 0; d < 3; ++d)
      if (n[d] <= -nx || n[d] >= nx) return false;
    if (xshape == XShape::Cube) return true;
    long r2 = long(n[0]) * n[0] + long(n[1]) * n[1] + long(n[2]) * n[2];
    return r2 < long(nx) * nx;
  }
  bool keeps_v(const Mode3& m) const {
    for (int d = 0; d < 3; ++d)
      if (m[d] <= -nv || m[d] >= nv) return false;
    return true;
  }

  bool operator==(const Band& o) const {
    return nx == o.nx && nv == o.nv && xshape == o.xshape;
  }
  bool operator!=(const Band& o) const { return !(*this == o); }

  /// Cube band holding every x- and v-mode reachable by multiplying
  /// `factors` fields on this band (alias-free product intermediate).
  Band product_extension(int factors) const {
    return Band(factors * (nx - 1) + 1, factors * (nv - 1) + 1, XShape::Cube);
  }
};

/// Band radius from the Knudsen number, N = ceil(1/eps^gamma); the kept set
/// {|m| < N} then equals {|m| < 1/eps^gamma} whether or not 1/eps^gamma is
/// an integer (strict inequality honored at the edge).
inline int knudsen_scaling_radius(double epsilon, double gamma) {
  if (!(epsilon > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("knudsen_scaling_radius: need eps, gamma > 0");
  return std::max(1, int(std::ceil(std::pow(epsilon, -gamma))));
}

}  // namespace kll
