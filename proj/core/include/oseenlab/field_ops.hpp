#pragma once

// Lattice spectral operations on xi-planes and slab fields: transforms,
// derivatives, de-aliasing, the scaled divergence, and the per-mode
// divergence-free projection.  Also the padded axial transform used to form
// pointwise products without aliasing the retained ladder.

#include <Eigen/Dense>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

// In-place normalized xi transforms of one plane.  to_spectral leaves
// FFT-ordered coefficients scaled so that to_physical(to_spectral(f)) == f.
void xi_to_spectral(const Grid& g, Plane& plane);
void xi_to_physical(const Grid& g, Plane& plane);

// Partial derivative along xi direction dir (0 or 1) of a physical plane.
Plane xi_derivative(const Grid& g, const Plane& phys, int dir);

// Slice-wise xi-derivative of a whole ladder (dormant slices stay zero).
SpectralField xi_derivative(const SpectralField& f, int dir);

// Both xi-derivatives of a plane with a single forward transform.
void xi_gradient(const Grid& g, const Plane& phys, Plane& d1, Plane& d2);

// Laplacian in xi of a physical plane.
Plane xi_laplacian(const Grid& g, const Plane& phys);

// 2/3-rule mask applied to a physical plane (through spectral space) or to a
// whole field (all ladder slices).
void apply_dealias_mask(const Grid& g, Plane& phys);
void apply_dealias_mask(const Grid& g, SpectralField& f);

// Fraction of a plane's spectral mass (squared) outside the kept band.
double dealias_tail_fraction(const Grid& g, const Plane& phys);

// Scaled axial derivative: multiplies ladder slice j by i * e^{tau/2} * zeta(j).
SpectralField dz_scaled(const SpectralField& f, double tau);

// Scaled divergence div_xi w^xi + e^{tau/2} dz w^z of a vorticity state.
SpectralField scaled_divergence(const VorticityState& w);

// Sup over ladder slices and grid points of |scaled divergence|.
double scaled_divergence_sup(const VorticityState& w);

// Per-mode projection onto the kernel of the scaled divergence:
// what <- what - d (d . what)/|d|^2 with d = (k1, k2, e^{tau/2} zeta).
// Exactly idempotent; leaves the (0,0,zeta=0) triple untouched.
void project_div_free(VorticityState& w);

// Mean (xi-average) of ladder slice 0, i.e. the mass density of the field;
// mass(f) = box_area * slice0_mean(f).
std::complex<double> slice0_mean(const SpectralField& f);
double field_mass(const SpectralField& f);

// Remove the axial mass of slice 0 along a rapidly decaying unit-mass
// Gaussian profile, leaving slice0_mean(f) == 0.  Subtracting a flat
// constant instead would leave non-decaying content that the drift term of
// the dynamics amplifies like e^tau.
void remove_axial_mass(SpectralField& f);

// ---- padded axial lines for pointwise products --------------------------

// Smallest 2^a 3^b 5^c length >= n.
int good_fft_length(int n);

// Transform length that de-aliases products of two retained ladders.
int padded_z_length(const Grid& g);

// Physical axial lines: row = xi point (column-major plane order),
// column = axial sample on the padded grid of length Mz.
Eigen::ArrayXXd z_physical_lines(const SpectralField& f, int Mz);

// Inverse of z_physical_lines: retain ladder slots 0..N_z of each line.
SpectralField field_from_z_lines(const Grid& g, const Eigen::ArrayXXd& lines, int Mz);

// Pointwise product of two slab fields via padded axial lines.  By default
// the output is dealias-masked in xi, matching the convention of the
// nonlinear terms in the evolution; pass dealias = false to keep the exact
// lattice values instead (a sharp mask turns a smooth product into one with
// box-filling ripples whose weighted norms are resolution-dependent, which
// matters when the product itself is the measured object).  Inputs are
// expected already masked in xi.
SpectralField multiply_fields(const SpectralField& a, const SpectralField& b,
                              bool dealias = true);

}  // namespace oseenlab
