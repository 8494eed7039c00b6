#pragma once

// Run-time diagnostics: the axial-dynamics closure defect, decay-rate fits,
// and small numerical-order helpers shared by the verification scenarios.

#include <vector>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

// Closure defect of the axial component in the full gauge,
//   R = dz_bar(-Lap_bar)^{-1}(w^xi)_perp . grad_xi w^z
//       + v^z dz_bar w^z  -  (w . grad_bar) v^z,
// which vanishes identically when w^xi = 0 and the state is axially
// constant.  Products are dealiased like the evolution's explicit terms.
SpectralField axial_defect(const VorticityState& w);

// Core-gauge variant in divergence form,
//   R' = div_xi(v_c^xi w_c^z - w_c^xi v_c^z)
//        - grad_perp(Lap_bar)^{-1} w_c^z . grad_xi w_c^z.
SpectralField axial_defect_core(const VorticityState& w_core);

// Defect together with its controlling source size
// ||w^xi||_{Bz L2(m)} + ||grad_xi w^xi||_{Bz L2(m)}.  Dispatches on the
// state's gauge (full -> axial_defect, core -> axial_defect_core).
struct AxialDefectSample {
  double tau = 0.0;
  double defect = 0.0;  // Bz L^{4/3}(m) norm of the defect field
  double source = 0.0;
};
AxialDefectSample measure_axial_defect(const VorticityState& w);

// Least-squares fit of log y = log_amplitude + rate * x (requires y > 0).
struct DecayFit {
  double rate = 0.0;
  double log_amplitude = 0.0;
  double max_residual = 0.0;  // max |log y_i - fit|
};
DecayFit fit_decay_rate(const std::vector<double>& x,
                        const std::vector<double>& y);

// Observed order from two refinement errors: log(e_coarse/e_fine)/log(ratio).
double convergence_order(double err_coarse, double err_fine,
                         double ratio = 2.0);

}  // namespace oseenlab
