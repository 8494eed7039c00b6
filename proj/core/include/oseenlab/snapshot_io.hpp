#pragma once

// Snapshot container: magic "OSLSNAP1", a length-prefixed JSON header
// (grid geometry, tau, alpha, gauge, format version), then the three
// components' ladder coefficients as little-endian complex128, slice by
// slice in column-major plane order.  Round-trips bit-exactly.

#include <filesystem>

#include "oseenlab/evolution.hpp"
#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

void save_snapshot(const std::filesystem::path& file, const VorticityState& w);
VorticityState load_snapshot(const std::filesystem::path& file);

// Trajectory samples as CSV (header row + one row per sample).
void write_trajectory_csv(const std::filesystem::path& file,
                          const Trajectory& traj);

}  // namespace oseenlab
