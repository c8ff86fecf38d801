#include "kll/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

namespace kll {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

inline Mode3 neg(const Mode3& m) { return {-m[0], -m[1], -m[2]}; }
}  // namespace

// --- VWeight ----------------------------------------------------------------

void VWeight::add(const Mode3& m, Complex c) { entries.emplace_back(m, c); }

void VWeight::compress(double drop_tol) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Mode3, Complex>> merged;
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  entries.clear();
  for (const auto& e : merged)
    if (std::abs(e.second) > drop_tol) entries.push_back(e);
}

VWeight& VWeight::operator*=(double s) {
  for (auto& e : entries) e.second *= s;
  return *this;
}

VWeight& VWeight::axpy(double s, const VWeight& other) {
  for (const auto& e : other.entries) entries.emplace_back(e.first, s * e.second);
  compress();
  return *this;
}

Complex VWeight::coeff(const Mode3& m) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), m,
                             [](const auto& a, const Mode3& k) { return a.first < k; });
  if (it != entries.end() && it->first == m) return it->second;
  return {0.0, 0.0};
}

double VWeight::dot(const VWeight& g) const {
  // integral of w*g = sum_m w(m) g(-m); both real-valued so this is real.
  Complex acc{0.0, 0.0};
  for (const auto& e : entries) acc += e.second * g.coeff(neg(e.first));
  return acc.real();
}

double VWeight::l2_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += std::norm(e.second);
  return std::sqrt(s);
}

// --- SpectralField -----------------------------------------------------------

SpectralField::SpectralField(const Band& b) : band(b) {
  const std::size_t X = b.x_side(), V = b.v_side();
  coeffs.assign(X * X * X * V * V * V, Complex{0.0, 0.0});
}

void SpectralField::set(const Mode3& n, const Mode3& m, Complex c) {
  if (!band.keeps_x(n) || !band.keeps_v(m)) return;
  coeffs[index(n, m)] = c;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) { return axpy(1.0, o); }
SpectralField& SpectralField::operator-=(const SpectralField& o) { return axpy(-1.0, o); }

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  if (o.band == band) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += s * o.coeffs[i];
    return *this;
  }
  for (const auto& n : x_modes(band))
    for (const auto& m : v_modes(band)) coeffs[index(n, m)] += s * o.at(n, m);
  return *this;
}

double SpectralField::max_abs() const {
  double v = 0.0;
  for (const auto& c : coeffs) v = std::max(v, std::abs(c));
  return v;
}

bool SpectralField::finite() const {
  for (const auto& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

double SpectralField::reality_defect() const {
  double worst = 0.0;
  for (const auto& n : x_modes(band))
    for (const auto& m : v_modes(band))
      worst = std::max(worst, std::abs(at(n, m) - std::conj(at(neg(n), neg(m)))));
  return worst;
}

void SpectralField::enforce_reality() {
  for (const auto& n : x_modes(band))
    for (const auto& m : v_modes(band)) {
      Mode3 nn = neg(n), nm = neg(m);
      Complex avg = 0.5 * (at(n, m) + std::conj(at(nn, nm)));
      coeffs[index(n, m)] = avg;
      coeffs[index(nn, nm)] = std::conj(avg);
    }
}

// --- XField ------------------------------------------------------------------

XField::XField(const Band& b) : band(b) {
  const std::size_t X = b.x_side();
  coeffs.assign(X * X * X, Complex{0.0, 0.0});
}

void XField::set(const Mode3& n, Complex c) {
  if (!band.keeps_x(n)) return;
  coeffs[index(n)] = c;
}

XField& XField::operator+=(const XField& o) { return axpy(1.0, o); }
XField& XField::operator-=(const XField& o) { return axpy(-1.0, o); }

XField& XField::operator*=(double s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

XField& XField::axpy(double s, const XField& o) {
  if (o.band.nx == band.nx && o.band.xshape == band.xshape) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += s * o.coeffs[i];
    return *this;
  }
  for (const auto& n : x_modes(band)) coeffs[index(n)] += s * o.at(n);
  return *this;
}

double XField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

double XField::h1_norm() const {
  double s = 0.0;
  for (const auto& n : x_modes(band)) {
    double k2 = kTwoPi * kTwoPi * (double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2]);
    s += (1.0 + k2) * std::norm(at(n));
  }
  return std::sqrt(s);
}

double XField::hm1_norm() const {
  double s = 0.0;
  for (const auto& n : x_modes(band)) {
    double k2 = kTwoPi * kTwoPi * (double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2]);
    s += std::norm(at(n)) / (1.0 + k2);
  }
  return std::sqrt(s);
}

double XField::max_abs() const {
  double v = 0.0;
  for (const auto& c : coeffs) v = std::max(v, std::abs(c));
  return v;
}

bool XField::finite() const {
  for (const auto& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

double XField::reality_defect() const {
  double worst = 0.0;
  for (const auto& n : x_modes(band))
    worst = std::max(worst, std::abs(at(n) - std::conj(at(neg(n)))));
  return worst;
}

void XField::enforce_reality() {
  for (const auto& n : x_modes(band)) {
    Mode3 nn = neg(n);
    Complex avg = 0.5 * (at(n) + std::conj(at(nn)));
    coeffs[index(n)] = avg;
    coeffs[index(nn)] = std::conj(avg);
  }
}

// --- mode iteration -----------------------------------------------------------

namespace {
struct ModeCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, std::vector<Mode3>> entries;
};
}  // namespace

const std::vector<Mode3>& x_modes(const Band& b) {
  static ModeCache cache;
  std::lock_guard<std::mutex> lock(cache.mu);
  auto key = std::make_tuple(b.nx, int(b.xshape), 0);
  auto it = cache.entries.find(key);
  if (it != cache.entries.end()) return it->second;
  std::vector<Mode3> out;
  const int R = b.nx - 1;
  for (int a = -R; a <= R; ++a)
    for (int c = -R; c <= R; ++c)
      for (int d = -R; d <= R; ++d) {
        Mode3 n{a, c, d};
        if (b.keeps_x(n)) out.push_back(n);
      }
  return cache.entries.emplace(key, std::move(out)).first->second;
}

const std::vector<Mode3>& v_modes(const Band& b) {
  static ModeCache cache;
  std::lock_guard<std::mutex> lock(cache.mu);
  auto key = std::make_tuple(b.nv, 0, 1);
  auto it = cache.entries.find(key);
  if (it != cache.entries.end()) return it->second;
  std::vector<Mode3> out;
  const int S = b.nv - 1;
  for (int a = -S; a <= S; ++a)
    for (int c = -S; c <= S; ++c)
      for (int d = -S; d <= S; ++d) out.push_back(Mode3{a, c, d});
  return cache.entries.emplace(key, std::move(out)).first->second;
}

// --- cutoff, derivative ---------------------------------------------------------

SpectralField cutoff(const SpectralField& f, const Band& band) {
  SpectralField out(band);
  for (const auto& n : x_modes(band))
    for (const auto& m : v_modes(band)) out.coeffs[out.index(n, m)] = f.at(n, m);
  return out;
}

XField cutoff_x(const XField& f, const Band& band) {
  XField out(band);
  for (const auto& n : x_modes(band)) out.coeffs[out.index(n)] = f.at(n);
  return out;
}

SpectralField derivative_x(const SpectralField& f, int axis) {
  SpectralField out(f.band);
  for (const auto& n : x_modes(f.band)) {
    Complex mult{0.0, kTwoPi * n[axis]};
    for (const auto& m : v_modes(f.band))
      out.coeffs[out.index(n, m)] = mult * f.coeffs[f.index(n, m)];
  }
  return out;
}

XField derivative_x(const XField& f, int axis) {
  XField out(f.band);
  for (const auto& n : x_modes(f.band))
    out.coeffs[out.index(n)] = Complex{0.0, kTwoPi * n[axis]} * f.coeffs[f.index(n)];
  return out;
}

// --- products --------------------------------------------------------------------

namespace {

// Dense 6-D convolution. Two strategies:
//  * pair accumulation, cost |f|*|g|, valid when `out` holds every reachable sum;
//  * gather, cost |out|*|g|, valid always (random access into f).
// The cheaper one is chosen per call.
void convolve(const SpectralField& f, const SpectralField& g, SpectralField& out) {
  const auto& fx = x_modes(f.band);
  const auto& fv = v_modes(f.band);
  const auto& gx = x_modes(g.band);
  const auto& gv = v_modes(g.band);
  const auto& ox = x_modes(out.band);
  const auto& ov = v_modes(out.band);

  const std::size_t cost_pairs = fx.size() * fv.size() * gx.size() * gv.size();
  const std::size_t cost_gather = ox.size() * ov.size() * gx.size() * gv.size();

  // pair accumulation is only exact if out holds the whole Minkowski sum
  const bool out_covers_sum =
      out.band.xshape == XShape::Cube &&
      out.band.nx >= f.band.nx + g.band.nx - 1 && out.band.nv >= f.band.nv + g.band.nv - 1;

  if (out_covers_sum && cost_pairs <= cost_gather) {
    for (const auto& n1 : fx)
      for (const auto& m1 : fv) {
        const Complex a = f.coeffs[f.index(n1, m1)];
        if (a == Complex{0.0, 0.0}) continue;
        for (const auto& n2 : gx) {
          Mode3 n{n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2]};
          for (const auto& m2 : gv) {
            const Complex b = g.coeffs[g.index(n2, m2)];
            if (b == Complex{0.0, 0.0}) continue;
            Mode3 m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            out.coeffs[out.index(n, m)] += a * b;
          }
        }
      }
    return;
  }

  for (const auto& n : ox)
    for (const auto& m : ov) {
      Complex acc{0.0, 0.0};
      for (const auto& n2 : gx) {
        Mode3 nd{n[0] - n2[0], n[1] - n2[1], n[2] - n2[2]};
        if (!f.band.keeps_x(nd)) continue;
        for (const auto& m2 : gv) {
          const Complex b = g.coeffs[g.index(n2, m2)];
          if (b == Complex{0.0, 0.0}) continue;
          Mode3 md{m[0] - m2[0], m[1] - m2[1], m[2] - m2[2]};
          if (!f.band.keeps_v(md)) continue;
          acc += f.coeffs[f.index(nd, md)] * b;
        }
      }
      out.coeffs[out.index(n, m)] += acc;
    }
}

}  // namespace

SpectralField product(const SpectralField& f, const SpectralField& g, const Band& out) {
  SpectralField res(out);
  convolve(f, g, res);
  return res;
}

XField product(const XField& f, const XField& g, const Band& out) {
  XField res(out);
  const auto& fx = x_modes(f.band);
  const auto& gx = x_modes(g.band);
  const auto& ox = x_modes(out);
  const bool out_covers_sum =
      out.xshape == XShape::Cube && out.nx >= f.band.nx + g.band.nx - 1;
  if (out_covers_sum && fx.size() * gx.size() <= ox.size() * gx.size()) {
    for (const auto& n1 : fx) {
      const Complex a = f.coeffs[f.index(n1)];
      if (a == Complex{0.0, 0.0}) continue;
      for (const auto& n2 : gx) {
        Mode3 n{n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2]};
        res.coeffs[res.index(n)] += a * g.coeffs[g.index(n2)];
      }
    }
    return res;
  }
  for (const auto& n : ox) {
    Complex acc{0.0, 0.0};
    for (const auto& n2 : gx) {
      Mode3 nd{n[0] - n2[0], n[1] - n2[1], n[2] - n2[2]};
      if (!f.band.keeps_x(nd)) continue;
      acc += f.coeffs[f.index(nd)] * g.coeffs[g.index(n2)];
    }
    res.coeffs[res.index(n)] = acc;
  }
  return res;
}

// --- sawtooth multiplication -----------------------------------------------------

namespace {
// Fourier coefficient of v on [-1/2, 1/2]: 0 at m = 0, (-1)^m i/(2 pi m) else.
inline Complex sawtooth_hat(int m) {
  if (m == 0) return {0.0, 0.0};
  double s = ((m & 1) ? -1.0 : 1.0) / (kTwoPi * m);
  return {0.0, s};
}
}  // namespace

SpectralField multiply_by_sawtooth(const SpectralField& f, int axis, const Band& out) {
  SpectralField res(out);
  const auto& ox = x_modes(out);
  const auto& fvm = v_modes(f.band);
  const int S = out.nv - 1;
  // 1-D convolution in the axis-th v index with the analytic coefficients;
  // only lags |m - m'| <= nv_f + nv_out enter, result exact.
  for (const auto& n : ox) {
    if (!f.band.keeps_x(n)) continue;
    for (const auto& mf : fvm) {
      const Complex a = f.coeffs[f.index(n, mf)];
      if (a == Complex{0.0, 0.0}) continue;
      for (int mo = -S; mo <= S; ++mo) {
        Mode3 m = mf;
        m[axis] = mo;
        const Complex s = sawtooth_hat(mo - mf[axis]);
        if (s == Complex{0.0, 0.0}) continue;
        res.coeffs[res.index(n, m)] += s * a;
      }
    }
  }
  return res;
}

// --- norms, moments ---------------------------------------------------------------

XNorms x_norm(const SpectralField& f) {
  double l2 = 0.0, h1 = 0.0;
  for (const auto& n : x_modes(f.band)) {
    double k2 = kTwoPi * kTwoPi * (double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2]);
    double row = 0.0;
    for (const auto& m : v_modes(f.band)) row += std::norm(f.coeffs[f.index(n, m)]);
    l2 += row;
    h1 += (1.0 + k2) * row;
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

XField v_moment(const SpectralField& f, const VWeight& weight) {
  XField out(Band(f.band.nx, 1, f.band.xshape));
  for (const auto& n : x_modes(f.band)) {
    Complex acc{0.0, 0.0};
    for (const auto& e : weight.entries) {
      Mode3 mm = neg(e.first);
      if (!f.band.keeps_v(mm)) continue;
      acc += f.coeffs[f.index(n, mm)] * e.second;
    }
    out.coeffs[out.index(n)] = acc;
  }
  return out;
}

void add_outer(SpectralField& f, const XField& a, const VWeight& w, double scale) {
  for (const auto& n : x_modes(f.band)) {
    const Complex av = scale * a.at(n);
    if (av == Complex{0.0, 0.0}) continue;
    for (const auto& e : w.entries) {
      if (!f.band.keeps_v(e.first)) continue;
      f.coeffs[f.index(n, e.first)] += av * e.second;
    }
  }
}

XField v_moment_sawtooth(const SpectralField& f, int axis, const VWeight& weight) {
  // integral of f * v_axis * weight dv, exact: the true sawtooth contributes
  // only lags reachable from f's band against the weight's support.
  XField out(Band(f.band.nx, 1, f.band.xshape));
  for (const auto& n : x_modes(f.band)) {
    Complex acc{0.0, 0.0};
    for (const auto& e : weight.entries) {
      for (const auto& m : v_modes(f.band)) {
        // term f(m) * w(e) * s(k) with m + e.first + k = 0
        Mode3 k{-m[0] - e.first[0], -m[1] - e.first[1], -m[2] - e.first[2]};
        bool ok = true;
        for (int d = 0; d < 3; ++d)
          if (d != axis && k[d] != 0) ok = false;
        if (!ok) continue;
        const Complex s = sawtooth_hat(k[axis]);
        if (s == Complex{0.0, 0.0}) continue;
        acc += f.coeffs[f.index(n, m)] * e.second * s;
      }
    }
    out.coeffs[out.index(n)] = acc;
  }
  return out;
}

// --- grid evaluation ----------------------------------------------------------------

std::vector<double> evaluate_on_grid(const SpectralField& f, int gx, int gv) {
  const auto& xn = x_modes(f.band);
  const auto& vm = v_modes(f.band);
  std::vector<double> out(std::size_t(gx) * gx * gx * gv * gv * gv, 0.0);
  std::vector<Complex> ex(std::size_t(gx) * (2 * f.band.nx - 1));
  std::vector<Complex> ev(std::size_t(gv) * (2 * f.band.nv - 1));
  for (int i = 0; i < gx; ++i)
    for (int k = -(f.band.nx - 1); k <= f.band.nx - 1; ++k)
      ex[i * (2 * f.band.nx - 1) + (k + f.band.nx - 1)] =
          std::polar(1.0, kTwoPi * k * (double(i) / gx));
  for (int i = 0; i < gv; ++i)
    for (int k = -(f.band.nv - 1); k <= f.band.nv - 1; ++k)
      ev[i * (2 * f.band.nv - 1) + (k + f.band.nv - 1)] =
          std::polar(1.0, kTwoPi * k * (double(i) / gv - 0.5));
  const int RX = f.band.nx - 1, RV = f.band.nv - 1;
  std::size_t idx = 0;
  for (int x1 = 0; x1 < gx; ++x1)
    for (int x2 = 0; x2 < gx; ++x2)
      for (int x3 = 0; x3 < gx; ++x3)
        for (int v1 = 0; v1 < gv; ++v1)
          for (int v2 = 0; v2 < gv; ++v2)
            for (int v3 = 0; v3 < gv; ++v3) {
              Complex acc{0.0, 0.0};
              for (const auto& n : xn) {
                Complex px = ex[x1 * (2 * RX + 1) + n[0] + RX] * ex[x2 * (2 * RX + 1) + n[1] + RX] *
                             ex[x3 * (2 * RX + 1) + n[2] + RX];
                for (const auto& m : vm) {
                  Complex pv = ev[v1 * (2 * RV + 1) + m[0] + RV] *
                               ev[v2 * (2 * RV + 1) + m[1] + RV] *
                               ev[v3 * (2 * RV + 1) + m[2] + RV];
                  acc += f.coeffs[f.index(n, m)] * px * pv;
                }
              }
              out[idx++] = acc.real();
            }
  return out;
}

std::vector<double> evaluate_on_grid(const XField& f, int gx) {
  const auto& xn = x_modes(f.band);
  std::vector<double> out(std::size_t(gx) * gx * gx, 0.0);
  std::size_t idx = 0;
  for (int x1 = 0; x1 < gx; ++x1)
    for (int x2 = 0; x2 < gx; ++x2)
      for (int x3 = 0; x3 < gx; ++x3) {
        Complex acc{0.0, 0.0};
        for (const auto& n : xn)
          acc += f.coeffs[f.index(n)] *
                 std::polar(1.0, kTwoPi * (n[0] * double(x1) + n[1] * double(x2) + n[2] * double(x3)) / gx);
        out[idx++] = acc.real();
      }
  return out;
}

// --- random fields ---------------------------------------------------------------------

SpectralField random_field(const Band& b, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  SpectralField f(b);
  for (const auto& n : x_modes(b))
    for (const auto& m : v_modes(b))
      f.coeffs[f.index(n, m)] = Complex{dist(rng), dist(rng)};
  // symmetrize to a real-valued field and scale
  f.enforce_reality();
  f *= amplitude;
  return f;
}

XField random_xfield(const Band& b, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  XField f(b);
  for (const auto& n : x_modes(b)) f.coeffs[f.index(n)] = Complex{dist(rng), dist(rng)};
  f.enforce_reality();
  f *= amplitude;
  return f;
}

}  // namespace kll
