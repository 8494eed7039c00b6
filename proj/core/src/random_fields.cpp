#include "oseenlab/random_fields.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "oseenlab/field_ops.hpp"
#include "oseenlab/norms.hpp"

namespace oseenlab {
namespace {

using cplx = std::complex<double>;

// White coefficients on the kept band, localized by a Gaussian envelope in
// physical space, re-masked afterwards.  Slice 0 is kept real (the ladder
// represents a real axial spectrum); higher slices are freely complex.
SpectralField raw_band_field(const Grid& g, const RandomFieldOptions& opt) {
  const int band = std::min(opt.planar_band, g.dealias_cut());
  if (band < 1) {
    throw std::invalid_argument("random field: planar_band must keep a mode");
  }
  const int zmax = std::min(opt.axial_band, g.N_z);
  if (!(opt.envelope_radius > 0.0)) {
    throw std::invalid_argument("random field: envelope_radius must be > 0");
  }
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int N = g.N_xi;
  Eigen::ArrayXXd envelope(N, N);
  const double inv_r2 = 1.0 / (opt.envelope_radius * opt.envelope_radius);
  for (int i2 = 0; i2 < N; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < N; ++i1) {
      const double x1 = g.xi(i1);
      envelope(i1, i2) = std::exp(-(x1 * x1 + x2 * x2) * inv_r2);
    }
  }

  SpectralField f(g);
  for (int j = 0; j <= zmax; ++j) {
    Plane spec = Plane::Zero(N, N);
    for (int s2 = 0; s2 < N; ++s2) {
      if (std::abs(g.signed_index(s2)) > band) continue;
      for (int s1 = 0; s1 < N; ++s1) {
        if (std::abs(g.signed_index(s1)) > band) continue;
        spec(s1, s2) = cplx(gauss(rng), gauss(rng));
      }
    }
    xi_to_physical(g, spec);
    if (j == 0) spec.imag().setZero();
    spec.array() *= envelope;
    apply_dealias_mask(g, spec);
    f.slice(j) = std::move(spec);
  }
  f.enforce_real_slice0();
  return f;
}

void normalize_amplitude(SpectralField& f, double amplitude, double m) {
  if (amplitude <= 0.0) return;
  const double n = bz_norm(f, 2.0, m);
  if (n > 0.0) f *= amplitude / n;
}

}  // namespace

SpectralField random_scalar_field(const Grid& g, const RandomFieldOptions& opt) {
  SpectralField f = raw_band_field(g, opt);
  normalize_amplitude(f, opt.amplitude, g.weight_m);
  return f;
}

SpectralField random_mean_free_field(const Grid& g,
                                     const RandomFieldOptions& opt) {
  SpectralField f = raw_band_field(g, opt);
  remove_axial_mass(f);
  normalize_amplitude(f, opt.amplitude, g.weight_m);
  return f;
}

VorticityState random_divergence_free_state(const Grid& g, double tau,
                                            const RandomFieldOptions& opt) {
  VorticityState w(g, tau, 0.0, Gauge::full);
  RandomFieldOptions r = opt;
  r.amplitude = 0.0;  // normalize jointly below
  w.wxi1 = raw_band_field(g, r);
  r.seed = opt.seed + 101;
  w.wxi2 = raw_band_field(g, r);
  r.seed = opt.seed + 202;
  w.wz = raw_band_field(g, r);
  project_div_free(w);
  remove_axial_mass(w.wz);
  if (opt.amplitude > 0.0) {
    const double n =
        bz_norm({&w.wxi1, &w.wxi2, &w.wz}, 2.0, g.weight_m);
    if (n > 0.0) {
      const double s = opt.amplitude / n;
      w.wxi1 *= s;
      w.wxi2 *= s;
      w.wz *= s;
    }
  }
  return w;
}

}  // namespace oseenlab
