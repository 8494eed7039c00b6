#pragma once

// Dense operator kernels for the planar drift-diffusion flow and for moving
// planes between grids.
//
// The planar flow e^{dtau (Delta + xi.grad/2 + 1)} is realized as the matrix
// exponential of the fixed one-direction lattice generator
//
//   L1 = D2 + diag(xi)/2 * D1 + I/2
//
// (D1, D2 the spectral derivative matrices of the trigonometric interpolant),
// applied to both xi directions.  Exponentials of one fixed matrix compose to
// roundoff for any split of the interval, so stepping a trajectory in small
// increments lands on the same field as one long application -- the property
// every Duhamel-style consistency check of the solver leans on.  A closed-form
// alternative (heat multiplier plus resampling at the dilated points
// e^{dtau/2} xi) matches the continuum flow just as well but resamples
// off-lattice, and the sampling residue it leaves differs between splits of
// the same interval.

#include <Eigen/Dense>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

// Cached one-direction step matrix exp(dtau * L1); dtau must be >= 0.
const Eigen::MatrixXd& fokker_planck_step_matrix(const Grid& g, double dtau);

// plane = M * plane * M^T with M the step matrix (both directions, the +1/2
// in each L1 supplying the full +1 of the planar generator).
void apply_fokker_planck_step(const Grid& g, Plane& plane, double dtau);

// Resample a plane from grid `src` onto grid `dst` evaluating the trig
// interpolant of `src` at scale*xi_dst (points outside the source box are
// taken from the periodic interpolant; callers keep fields decayed there).
// If tail_flagged is non-null it is set when the source plane carries
// spectral mass that the resampling cannot represent on dst.
Plane resample_plane(const Grid& src, const Plane& phys, const Grid& dst,
                     double scale, bool* tail_flagged = nullptr);

// Drop all cached operator matrices (testing / memory hygiene).
void clear_resample_cache();

}  // namespace oseenlab
