#pragma once

// Velocity recovery from vorticity in the self-similar frame.
//
// The scaled Laplacian has per-mode symbol -(|k|^2 + e^tau zeta^2); the
// velocity blocks are
//   v^xi = dz_bar (-Lap_bar)^{-1} (w^xi)_perp - grad_perp (-Lap_bar)^{-1} w^z
//   v^z  = grad_perp . (-Lap_bar)^{-1} w^xi
// with a_perp = (-a2, a1) and grad_perp = (-d2, d1).  The output is
// divergence-free identically, mode by mode.
//
// The (zeta=0, k=0) slot of the inversion is excluded.  Axial mass there
// (a net column) cannot be inverted on the lattice: the strict entry point
// raises an error directing callers to the core/analytic channel, which
// carries that mass as the closed-form swirl.

#include <optional>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

struct InvLaplacianStats {
  double excluded_mass = 0.0;  // |coefficient| dropped at (zeta=0, k=0)
  bool flagged = false;        // excluded_mass > 1e-12
};

// (-Lap_bar)^{-1} at time tau; zero mode dropped (stats reports its mass).
SpectralField inv_laplacian_scaled(const SpectralField& f, double tau,
                                   InvLaplacianStats* stats = nullptr);

// Strict Biot-Savart: requires the axial component mean-free at zeta = 0
// (throws std::invalid_argument otherwise, directing to velocity_core).
VelocityState velocity_from_vorticity(const VorticityState& w);

// Velocity of a core-gauge state: lattice inversion of the core field plus
// the analytic channel alpha * (v_G, 0).
VelocityState velocity_core(const VorticityState& w_core);

// Gauge-aware total velocity: core states go through velocity_core; full
// states split off their axial mass c onto the analytic channel
// (w^z -> w^z - c G, oseen_coeff = c) and invert the rest on the lattice.
VelocityState velocity_total(const VorticityState& w);

// Planar stream-function velocity grad_perp Lap^{-1} f of one ladder slice,
// with the slice mass carried by the analytic channel: returns the lattice
// part of the de-massed slice; *channel receives the mass coefficient c
// (velocity += c * v_G pointwise).
void planar_velocity(const Grid& g, const Plane& f, Plane& v1, Plane& v2,
                     std::complex<double>* channel);

// Difference of the planar and scaled inversions, per mode:
//   1/|k|^2 - 1/(|k|^2 + e^tau zeta^2) = e^tau zeta^2 / (|k|^2 (|k|^2 + e^tau zeta^2)).
double biot_savart_difference_multiplier(double tau, double zeta, double k_sq);

// Per-ladder-slice audit quantities for the inversion-difference envelope
// (all three gradient/derivative norms of the lemma-style bound).
struct BiotSavartDifferenceSlice {
  int zeta_index = 0;
  double grad_diff_sup = 0.0;   // || grad (Lap^{-1} - Lap_bar^{-1}) f ||_inf
  double dz_inv_sup = 0.0;      // || dz_bar Lap_bar^{-1} f ||_inf
  double dz_grad_inv_l2 = 0.0;  // || dz_bar grad Lap_bar^{-1} f ||_2
  double envelope = 0.0;        // e^{(tau/2)(1-2 delta)} |zeta|^{1-2 delta} ||f_zeta||_{L2(m)}
};
std::vector<BiotSavartDifferenceSlice> biot_savart_difference(
    const SpectralField& f, double tau, double delta);

}  // namespace oseenlab
