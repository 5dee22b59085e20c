#pragma once

#include <string>

#include "blwave/spectral.hpp"

namespace blwave {

// BLK1 layout: "BLK1", u32 Nx, u32 Ny, f64 Lx, f64 Ly, then row-major f64
// payloads (x fastest), little endian. A FieldPair writes phi1 (periodic part),
// phi2, and a 16-byte trailer holding the mean gradient (gx, gy).
void write_snapshot(const std::string& path, const Field2D& f);
void write_snapshot(const std::string& path, const FieldPair& p);
Field2D read_field_snapshot(const std::string& path);
FieldPair read_pair_snapshot(const std::string& path);

}  // namespace blwave
