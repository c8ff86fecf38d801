#include "kll/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kll {

namespace {

constexpr char kMagic[4] = {'K', 'L', 'L', '1'};

void put_u32_le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void put_f64_le(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

void write_header(std::ostream& os, std::uint32_t nx, std::uint32_t nv, std::uint8_t kind) {
  os.write(kMagic, 4);
  put_u32_le(os, nx);
  put_u32_le(os, nv);
  os.put(static_cast<char>(kind));
}

}  // namespace

void save_checkpoint(const SpectralField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  write_header(os, std::uint32_t(f.band.nx), std::uint32_t(f.band.nv), 0);
  const int R = f.band.nx - 1, S = f.band.nv - 1;
  for (int n1 = -R; n1 <= R; ++n1)
    for (int n2 = -R; n2 <= R; ++n2)
      for (int n3 = -R; n3 <= R; ++n3)
        for (int m1 = -S; m1 <= S; ++m1)
          for (int m2 = -S; m2 <= S; ++m2)
            for (int m3 = -S; m3 <= S; ++m3) {
              Complex c = f.at({n1, n2, n3}, {m1, m2, m3});  // masked -> zero
              put_f64_le(os, c.real());
              put_f64_le(os, c.imag());
            }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

void save_checkpoint(const XField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  write_header(os, std::uint32_t(f.band.nx), 1, 1);
  const int R = f.band.nx - 1;
  for (int n1 = -R; n1 <= R; ++n1)
    for (int n2 = -R; n2 <= R; ++n2)
      for (int n3 = -R; n3 <= R; ++n3) {
        Complex c = f.at({n1, n2, n3});
        put_f64_le(os, c.real());
        put_f64_le(os, c.imag());
      }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  std::uint32_t nx = get_u32_le(is);
  std::uint32_t nv = get_u32_le(is);
  int kind = is.get();
  if (!is || nx < 1 || nv < 1 || (kind != 0 && kind != 1))
    throw std::runtime_error("checkpoint: bad header in " + path);

  LoadedCheckpoint out;
  if (kind == 0) {
    SpectralField f{Band(int(nx), int(nv))};
    const int R = int(nx) - 1, S = int(nv) - 1;
    for (int n1 = -R; n1 <= R; ++n1)
      for (int n2 = -R; n2 <= R; ++n2)
        for (int n3 = -R; n3 <= R; ++n3)
          for (int m1 = -S; m1 <= S; ++m1)
            for (int m2 = -S; m2 <= S; ++m2)
              for (int m3 = -S; m3 <= S; ++m3) {
                double re = get_f64_le(is), im = get_f64_le(is);
                f.set({n1, n2, n3}, {m1, m2, m3}, Complex{re, im});
              }
    if (!is) throw std::runtime_error("checkpoint: truncated " + path);
    out.field = std::move(f);
  } else {
    XField f{Band(int(nx), 1)};
    const int R = int(nx) - 1;
    for (int n1 = -R; n1 <= R; ++n1)
      for (int n2 = -R; n2 <= R; ++n2)
        for (int n3 = -R; n3 <= R; ++n3) {
          double re = get_f64_le(is), im = get_f64_le(is);
          f.set({n1, n2, n3}, Complex{re, im});
        }
    if (!is) throw std::runtime_error("checkpoint: truncated " + path);
    out.is_xfield = true;
    out.xfield = std::move(f);
  }
  return out;
}

}  // namespace kll
