#pragma once

// SpectralField: one real scalar field on the slab, stored as the
// nonnegative half of its axial Fourier ladder.  Slice j holds the complex
// xi-plane of the mode with axial wavenumber zeta(j); the implied negative
// modes are the conjugates.  Planes hold physical xi samples (quadrature and
// pointwise algebra are direct); xi-spectral work is done transiently.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "oseenlab/grid.hpp"

namespace oseenlab {

using Plane = Eigen::MatrixXcd;  // N_xi x N_xi complex xi-plane, (i1, i2) = (xi1, xi2)

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& g)
      : grid_(g), slices_(g.ladder_size(), Plane::Zero(g.N_xi, g.N_xi)) {}

  const Grid& grid() const { return grid_; }
  int ladder_size() const { return static_cast<int>(slices_.size()); }

  Plane& slice(int j) { return slices_[j]; }
  const Plane& slice(int j) const { return slices_[j]; }

  void set_zero() {
    for (auto& s : slices_) s.setZero();
  }

  // The ladder slot 0 of a real field must itself be a real plane; callers
  // that assemble slice 0 from complex arithmetic re-project with this.
  void enforce_real_slice0() {
    if (!slices_.empty()) slices_[0].imag().setZero();
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& s : slices_) m = std::max(m, s.cwiseAbs().maxCoeff());
    return m;
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (int j = 0; j < ladder_size(); ++j) slices_[j] += o.slices_[j];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (int j = 0; j < ladder_size(); ++j) slices_[j] -= o.slices_[j];
    return *this;
  }
  SpectralField& operator*=(double c) {
    for (auto& s : slices_) s *= c;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double c, SpectralField a) { return a *= c; }

 private:
  Grid grid_;
  std::vector<Plane> slices_;
};

enum class Gauge { full, core };

inline const char* gauge_name(Gauge g) { return g == Gauge::full ? "full" : "core"; }

// Inverse of gauge_name; throws std::invalid_argument on unknown names.
Gauge gauge_from_name(const std::string& name);

// Vorticity on the slab.  In the full gauge the components are the complete
// field; in the core gauge they are the deviation from the steady column
// alpha*G*e_z (whose axial mass is carried analytically, never on the
// lattice).  Core-gauge states keep the zeta=0 xi-mean of wz at zero.
struct VorticityState {
  Grid grid;
  double tau = 0.0;
  double alpha = 0.0;
  Gauge gauge = Gauge::full;
  SpectralField wxi1, wxi2, wz;

  explicit VorticityState(const Grid& g, double tau_ = 0.0, double alpha_ = 0.0,
                          Gauge gauge_ = Gauge::full)
      : grid(g), tau(tau_), alpha(alpha_), gauge(gauge_), wxi1(g), wxi2(g), wz(g) {}
  VorticityState() = default;

  SpectralField& component(int c) { return c == 0 ? wxi1 : (c == 1 ? wxi2 : wz); }
  const SpectralField& component(int c) const {
    return c == 0 ? wxi1 : (c == 1 ? wxi2 : wz);
  }
};

// Velocity on the slab: a lattice (periodic) part plus an analytic channel
// oseen_coeff * (v_G, 0) carrying the non-periodic swirl of any axial mass
// handled off-lattice.  Pointwise evaluation adds the closed-form channel;
// derivatives of the channel use the closed-form Jacobian, never the FFT.
struct VelocityState {
  Grid grid;
  double tau = 0.0;
  double oseen_coeff = 0.0;
  SpectralField vxi1, vxi2, vz;

  explicit VelocityState(const Grid& g, double tau_ = 0.0)
      : grid(g), tau(tau_), vxi1(g), vxi2(g), vz(g) {}
  VelocityState() = default;

  SpectralField& component(int c) { return c == 0 ? vxi1 : (c == 1 ? vxi2 : vz); }
  const SpectralField& component(int c) const {
    return c == 0 ? vxi1 : (c == 1 ? vxi2 : vz);
  }
};

}  // namespace oseenlab
