#pragma once

// Self-similar frame around a straight vortex column and the closed-form
// steady column profile.
//
// Coordinates: (tau, xi, z) = (log t, x/sqrt(t), z).  Vorticity and velocity
// pull back as w(tau, xi, z) = t * omega(t, sqrt(t) xi, z) and
// v(tau, xi, z) = sqrt(t) * u(t, sqrt(t) xi, z); the axial coordinate is not
// rescaled.  a_of_tau is the analogue of inverse time near tau -> 0.

#include <Eigen/Dense>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

// (1 - e^{-tau})^{-1}; throws std::domain_error for tau <= 0.
double a_of_tau(double tau);

// Radially symmetric Gaussian column profile and its swirl:
//   G(xi)  = (1/4pi) exp(-|xi|^2/4)
//   v_G(xi)= (1/2pi) xi_perp/|xi|^2 (1 - exp(-|xi|^2/4)),  xi_perp = (-xi2, xi1)
// v_G and its Jacobian switch to series below |xi| = 1e-3 (four terms).
double gauss_profile(double x1, double x2);
Eigen::Vector2d gauss_swirl(double x1, double x2);
Eigen::Matrix2d gauss_swirl_jacobian(double x1, double x2);
Eigen::Vector2d gauss_profile_gradient(double x1, double x2);  // = -(xi/2) G

// Column of strength alpha.
struct OseenProfile {
  double alpha = 1.0;

  // Axial vorticity alpha*G and planar swirl alpha*v_G at a point.
  double vorticity(double x1, double x2) const { return alpha * gauss_profile(x1, x2); }
  Eigen::Vector2d velocity(double x1, double x2) const {
    return alpha * gauss_swirl(x1, x2);
  }
  Eigen::Matrix2d velocity_jacobian(double x1, double x2) const {
    return alpha * gauss_swirl_jacobian(x1, x2);
  }
};

// Point evaluation of the column vorticity / swirl; plane samplers.
Plane oseen_vorticity(const Grid& g, double alpha);
void oseen_velocity(const Grid& g, double alpha, Plane& v1, Plane& v2);

// Cached per-grid samples of the profile quantities used by the linearized
// couplings (G, grad G, v_G, Dv_G), all closed-form.
struct OseenSamples {
  Plane g;            // G
  Plane dg1, dg2;     // grad G
  Plane vg1, vg2;     // v_G
  Plane dvg11, dvg12, dvg21, dvg22;  // Jacobian of v_G (d_j v_i)
};
const OseenSamples& oseen_samples(const Grid& g);

// Maps between physical-time coordinates and the self-similar frame.
struct CoordinateMap {
  double tau_of_t(double t) const;             // log t; t > 0 required
  double t_of_tau(double tau) const { return std::exp(tau); }
  double scale_of_t(double t) const { return std::sqrt(t); }  // x = sqrt(t) xi
};

// Physical-coordinates vorticity snapshot on its own xi-type grid: samples of
// omega(t, x, z) on [-L,L)^2 with the same axial ladder convention.
struct PhysicalSnapshot {
  Grid grid;      // grid of the physical x-plane
  double t = 1.0; // physical time > 0
  SpectralField wxi1, wxi2, wz;  // omega components sampled in x
};

// Pull a physical snapshot into the self-similar frame on target grid g
// (w = t * omega(t, sqrt(t) xi, z)), resampling the plane by trigonometric
// interpolation; aliasing_flagged reports spectral content the resampling
// cannot represent.  from_selfsim is the inverse.
VorticityState to_selfsim(const PhysicalSnapshot& snap, const Grid& g,
                          bool* aliasing_flagged = nullptr);
PhysicalSnapshot from_selfsim(const VorticityState& w, const Grid& physical_grid,
                              bool* aliasing_flagged = nullptr);

}  // namespace oseenlab
