#include "oseenlab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oseenlab/biot_savart.hpp"
#include "oseenlab/field_ops.hpp"
#include "oseenlab/norms.hpp"

namespace oseenlab {

SpectralField axial_defect(const VorticityState& w) {
  if (w.gauge != Gauge::full) {
    throw std::invalid_argument("axial_defect: state is not in the full gauge");
  }
  const double tau = w.tau;

  const SpectralField inv1 = inv_laplacian_scaled(w.wxi1, tau);
  const SpectralField inv2 = inv_laplacian_scaled(w.wxi2, tau);

  // Planar velocity excess over the axial component's own stream function,
  // dz_bar (-Lap_bar)^{-1} (w^xi)_perp with a_perp = (-a2, a1): driven
  // entirely by w^xi, so the axial-mass channel cancels and never appears.
  SpectralField u1 = dz_scaled(inv2, tau);
  u1 *= -1.0;
  const SpectralField u2 = dz_scaled(inv1, tau);

  SpectralField r = multiply_fields(u1, xi_derivative(w.wz, 0));
  r += multiply_fields(u2, xi_derivative(w.wz, 1));

  // v^z = grad_perp . (-Lap_bar)^{-1} w^xi with grad_perp = (-d2, d1).
  SpectralField vz = xi_derivative(inv2, 0);
  vz -= xi_derivative(inv1, 1);

  r += multiply_fields(vz, dz_scaled(w.wz, tau));

  r -= multiply_fields(w.wxi1, xi_derivative(vz, 0));
  r -= multiply_fields(w.wxi2, xi_derivative(vz, 1));
  r -= multiply_fields(w.wz, dz_scaled(vz, tau));
  r.enforce_real_slice0();
  return r;
}

SpectralField axial_defect_core(const VorticityState& w_core) {
  if (w_core.gauge != Gauge::core) {
    throw std::invalid_argument(
        "axial_defect_core: state is not in the core gauge");
  }
  const double tau = w_core.tau;

  // The quadratic closure defect is built from the perturbation's own
  // lattice velocity; the analytic column channel belongs to the linear
  // couplings, not here.
  const VelocityState v = velocity_from_vorticity(w_core);

  SpectralField flux1 = multiply_fields(v.vxi1, w_core.wz);
  flux1 -= multiply_fields(w_core.wxi1, v.vz);
  SpectralField flux2 = multiply_fields(v.vxi2, w_core.wz);
  flux2 -= multiply_fields(w_core.wxi2, v.vz);
  SpectralField r = xi_derivative(flux1, 0);
  r += xi_derivative(flux2, 1);

  // grad_perp (Lap_bar)^{-1} w^z . grad_xi w^z with grad_perp = (-d2, d1):
  // psi below is (-Lap_bar)^{-1} w^z, flipping the sign of that pairing.
  const SpectralField psi = inv_laplacian_scaled(w_core.wz, tau);
  const SpectralField s1 = xi_derivative(psi, 1);   // +d2 psi
  SpectralField s2 = xi_derivative(psi, 0);
  s2 *= -1.0;                                       // -d1 psi
  r -= multiply_fields(s1, xi_derivative(w_core.wz, 0));
  r -= multiply_fields(s2, xi_derivative(w_core.wz, 1));
  r.enforce_real_slice0();
  return r;
}

AxialDefectSample measure_axial_defect(const VorticityState& w) {
  const Grid& g = w.grid;
  const SpectralField r =
      w.gauge == Gauge::full ? axial_defect(w) : axial_defect_core(w);
  AxialDefectSample s;
  s.tau = w.tau;
  s.defect = bz_norm(r, 4.0 / 3.0, g.weight_m);
  const SpectralField d11 = xi_derivative(w.wxi1, 0);
  const SpectralField d21 = xi_derivative(w.wxi1, 1);
  const SpectralField d12 = xi_derivative(w.wxi2, 0);
  const SpectralField d22 = xi_derivative(w.wxi2, 1);
  s.source = bz_norm({&w.wxi1, &w.wxi2}, 2.0, g.weight_m) +
             bz_norm({&d11, &d21, &d12, &d22}, 2.0, g.weight_m);
  return s;
}

DecayFit fit_decay_rate(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 4 || y.size() != x.size()) {
    throw std::invalid_argument(
        "fit_decay_rate: needs at least 4 matched (x, y) points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> logy(n);
  for (int i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) {
      throw std::invalid_argument("fit_decay_rate: values must be positive");
    }
    logy[i] = std::log(y[i]);
    sx += x[i];
    sy += logy[i];
    sxx += x[i] * x[i];
    sxy += x[i] * logy[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw std::invalid_argument("fit_decay_rate: degenerate abscissae");
  }
  DecayFit fit;
  fit.rate = (n * sxy - sx * sy) / denom;
  fit.log_amplitude = (sy - fit.rate * sx) / n;
  for (int i = 0; i < n; ++i) {
    fit.max_residual = std::max(
        fit.max_residual,
        std::abs(logy[i] - (fit.log_amplitude + fit.rate * x[i])));
  }
  return fit;
}

double convergence_order(double err_coarse, double err_fine, double ratio) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !(ratio > 1.0)) {
    throw std::invalid_argument(
        "convergence_order: needs positive errors and ratio > 1");
  }
  return std::log(err_coarse / err_fine) / std::log(ratio);
}

}  // namespace oseenlab
