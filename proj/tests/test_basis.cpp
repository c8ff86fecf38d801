#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "kll/basis.hpp"

using namespace kll;

namespace {

// composite-Simpson quadrature oracle for the 1-D analytic coefficients
std::complex<double> simpson_coeff(int power, int m, int panels = 10000) {
  auto f = [&](double v) {
    double ph = -2.0 * M_PI * m * v;
    double base = (power == 1) ? v : v * v;
    return std::complex<double>(base * std::cos(ph), base * std::sin(ph));
  };
  const double a = -0.5, h = 1.0 / panels;
  std::complex<double> acc = f(a) + f(0.5);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

}  // namespace

TEST_CASE("sawtooth_coeff: closed form vs quadrature") {
  CHECK(sawtooth_coeff(0) == Complex{0.0, 0.0});
  CHECK(std::abs(sawtooth_coeff(1) - Complex{0.0, -1.0 / (2 * M_PI)}) < 1e-16);
  CHECK(std::abs(sawtooth_coeff(-1) - Complex{0.0, 1.0 / (2 * M_PI)}) < 1e-16);
  CHECK(std::abs(sawtooth_coeff(1).imag() + 0.15915494309) < 1e-10);
  for (int m = -6; m <= 6; ++m)
    CHECK(std::abs(sawtooth_coeff(m) - simpson_coeff(1, m)) < 1e-11);
  // conjugate symmetry of a real function
  for (int m = 1; m <= 5; ++m)
    CHECK(sawtooth_coeff(-m) == std::conj(sawtooth_coeff(m)));
}

TEST_CASE("vsq_coeff: closed form vs quadrature") {
  CHECK(vsq_coeff(0) == Complex{1.0 / 12.0, 0.0});
  CHECK(std::abs(vsq_coeff(1) - Complex{-1.0 / (2 * M_PI * M_PI), 0.0}) < 1e-16);
  CHECK(std::abs(vsq_coeff(2) - Complex{1.0 / (8 * M_PI * M_PI), 0.0}) < 1e-16);
  for (int m = -6; m <= 6; ++m)
    CHECK(std::abs(vsq_coeff(m) - simpson_coeff(2, m)) < 1e-11);
}

TEST_CASE("build_basis: closed-form c1 at the smallest band, Gram identity") {
  BasisSet b2 = build_basis(Band(2, 2));
  CHECK(b2.c1 == doctest::Approx(M_PI * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(b2.gram_residual < 1e-12);

  for (int nv : {3, 5, 16}) {
    BasisSet b = build_basis(Band(2, nv));
    CHECK(b.gram_residual < 1e-12);
    // c0 = c2/12 exactly at every band (mode 0 always kept)
    CHECK(b.c0 == doctest::Approx(b.c2 / 12.0).epsilon(1e-15));
    // the summed quadratic weight has norm sqrt(3) exactly
    CHECK(b.e2_sum.dot(b.e2_sum) == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("basis constants approach the analytic limits (rate ~ 1/N)") {
  const double c1_lim = 2.0 * std::sqrt(3.0);
  const double c2_lim = 6.0 * std::sqrt(5.0);
  const double c0_lim = std::sqrt(5.0) / 2.0;
  double prev1 = 1e9, prev2 = 1e9, prev0 = 1e9;
  for (int nv : {16, 32, 64}) {
    BasisSet b = build_basis(Band(2, nv));
    double g1 = std::abs(b.c1 - c1_lim), g2 = std::abs(b.c2 - c2_lim),
           g0 = std::abs(b.c0 - c0_lim);
    CHECK(g1 < prev1);
    CHECK(g2 < prev2);
    CHECK(g0 < prev0);
    prev1 = g1;
    prev2 = g2;
    prev0 = g0;
  }
  // the sawtooth sums converge like 1/N, so the 1e-3 window needs N ~ 2e3
  BasisSet big = build_basis(Band(2, 2048));
  CHECK(std::abs(big.c1 - c1_lim) < 1e-3);
  CHECK(std::abs(big.c2 - c2_lim) < 1e-6);
  CHECK(std::abs(big.c0 - c0_lim) < 1e-6);
}

TEST_CASE("cutoff tail errors decrease monotonically for v and v^2") {
  for (int s : {1, 2}) {
    double prev = 1e9;
    for (int nv : {2, 4, 8, 16, 32}) {
      double e = cutoff_l2_error(nv, s);
      CHECK(e < prev);
      prev = e;
    }
    CHECK(cutoff_l2_error(4096, s) < 1e-2);
  }
}

TEST_CASE("weight parities and supports") {
  BasisSet b = build_basis(Band(2, 4));
  for (int i = 0; i < 3; ++i) {
    for (const auto& [m, c] : b.e1[i].entries) {
      // support on the i-axis line, odd symmetry, no zero mode
      for (int d = 0; d < 3; ++d)
        if (d != i) CHECK(m[d] == 0);
      CHECK(m[i] != 0);
      Mode3 neg{-m[0], -m[1], -m[2]};
      CHECK(b.e1[i].coeff(neg) == -c);  // odd in v_i
    }
  }
  for (const auto& [m, c] : b.e2.entries) {
    Mode3 neg{-m[0], -m[1], -m[2]};
    CHECK(b.e2.coeff(neg) == c);  // even in every coordinate
    int off_axis = 0;
    for (int d = 0; d < 3; ++d)
      if (m[d] != 0) ++off_axis;
    CHECK(off_axis <= 1);  // sum of per-axis lines
  }
  // decoupling used by the normalization order: e1 _|_ {e0, e2} exactly
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(b.e1[i].dot(b.e0)) < 1e-16);
    CHECK(std::abs(b.e1[i].dot(b.e2)) < 1e-16);
  }
}

TEST_CASE("build_basis rejects bands that cannot distinguish v and v^2") {
  CHECK_THROWS(build_basis(Band(2, 1)));
}
