#pragma once

// Discretization of the periodic slab [-L_xi, L_xi)^2 x [0, z_period).
//
// The xi-plane carries a uniform N_xi x N_xi grid with the trigonometric
// (FFT) basis; the axial direction is represented by the retained Fourier
// ladder zeta_index in {-N_z, ..., N_z} with physical axial wavenumber
// zeta = 2*pi*zeta_index/z_period.  Real fields store only the nonnegative
// half of the ladder (conjugate symmetry supplies the rest).

#include <cmath>
#include <numbers>

namespace oseenlab {

inline constexpr double kPi = std::numbers::pi_v<double>;

struct Grid {
  double L_xi = 12.0;                // half-width of the xi box
  int N_xi = 128;                    // points per xi direction (power of two)
  int N_z = 16;                      // retained axial modes: |zeta_index| <= N_z
  double z_period = 2.0 * kPi;       // axial period
  double weight_m = 3.0;             // exponent of the <xi>^m norm weight

  // Throws std::invalid_argument with a specific message on bad parameters.
  void validate() const;

  double dx() const { return 2.0 * L_xi / N_xi; }
  double cell_area() const { return dx() * dx(); }
  double box_area() const { return 4.0 * L_xi * L_xi; }
  double xi(int i) const { return -L_xi + i * dx(); }

  // FFT-ordered signed mode index and xi wavenumber for storage index s.
  int signed_index(int s) const { return s < N_xi / 2 ? s : s - N_xi; }
  double k(int s) const { return (kPi / L_xi) * signed_index(s); }

  // Physical axial wavenumber of ladder slot j (j = 0..N_z).
  double zeta(int j) const { return 2.0 * kPi * j / z_period; }
  int ladder_size() const { return N_z + 1; }

  // 2/3-rule mask on the xi directions: keep |signed index| <= floor(N/3).
  int dealias_cut() const { return N_xi / 3; }
  bool mode_kept(int s1, int s2) const {
    return std::abs(signed_index(s1)) <= dealias_cut() &&
           std::abs(signed_index(s2)) <= dealias_cut();
  }

  // Largest single-call interval for the dilation in the Fokker-Planck
  // conjugation before spectral resampling could alias; longer intervals
  // are split internally.
  double dilation_cap() const { return 2.0 * std::log(N_xi * kPi / (3.0 * L_xi)); }

  // Weight <xi>^m at a grid point.
  double weight(double x1, double x2) const {
    return std::pow(1.0 + x1 * x1 + x2 * x2, 0.5 * weight_m);
  }

  bool same_layout(const Grid& o) const {
    return L_xi == o.L_xi && N_xi == o.N_xi && N_z == o.N_z && z_period == o.z_period;
  }
};

}  // namespace oseenlab
