#pragma once

// Seeded probe fields: band-limited in both directions, localized by a
// radial Gaussian envelope, normalized in the Bz L2(m) norm.  Deterministic
// for a fixed (grid, options) pair.

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

struct RandomFieldOptions {
  unsigned seed = 1;
  int planar_band = 8;           // |k index| <= band in each direction
  int axial_band = 2;            // ladder slices 0..band populated
  double amplitude = 1.0;        // target Bz L2(m) norm (0 = leave raw)
  double envelope_radius = 3.0;  // e^{-|xi|^2 / radius^2} localization
};

SpectralField random_scalar_field(const Grid& g, const RandomFieldOptions& opt);

// Mean-free scalar (axial mass removed before normalization).
SpectralField random_mean_free_field(const Grid& g,
                                     const RandomFieldOptions& opt);

// Divergence-free 3-component state at time tau (projected per mode with the
// tau-scaled symbol, axial mass removed, then normalized).
VorticityState random_divergence_free_state(const Grid& g, double tau,
                                            const RandomFieldOptions& opt);

}  // namespace oseenlab
