/// @file checkpoint.hpp
/// @brief Bit-exact binary spectra: magic "KLL1", little-endian u32 N_x,
///        u32 N_v, u8 kind (0 = SpectralField, 1 = XField), then (re, im)
///        f64 pairs row-major over (n1,n2,n3,m1,m2,m3), each index from
///        -(N-1)..(N-1); masked x-modes written as zeros. XField checkpoints
///        carry N_v = 1, which collapses the m loop to the single mode 0.
#pragma once

#include <string>

#include "kll/field.hpp"

namespace kll {

void save_checkpoint(const SpectralField& f, const std::string& path);
void save_checkpoint(const XField& f, const std::string& path);

/// Loads either kind; exactly one of the outputs is filled, flag says which.
struct LoadedCheckpoint {
  bool is_xfield = false;
  SpectralField field;
  XField xfield;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace kll
