#pragma once

// Nonlinear evolution in the self-similar frame.
//
// The time stepper is an integrating-factor Heun scheme over the exact
// two-parameter linear flow S0 (per-slice axial damping composed with the
// planar Fokker-Planck factor); only the quadratic transport/stretch terms
// and, in the core gauge, the column couplings are integrated explicitly.
// Full-gauge states evolve the complete vorticity; core-gauge states evolve
// the perturbation about the alpha-column, whose axial mass stays off the
// lattice for the whole run.

#include <functional>
#include <string>
#include <vector>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

struct EvolutionControls {
  double dt = 0.01;                // base step in tau; must lie in (0, 0.05]
  bool dealias = true;             // 2/3-mask the state every step
  bool projection_each_step = true;  // re-project onto divergence-free modes
  int record_every = 10;           // steps between trajectory samples
  int snapshot_stride = 0;         // steps between persisted snapshots (0 = none)
  double max_norm = 1e3;           // abort when the state norm exceeds this
  double slice_floor_rel = 1e-28;  // dormant-slice floor relative to initial sup

  // Throws std::invalid_argument unless dt in (0, 0.05], max_norm > 0,
  // record_every >= 1, snapshot_stride >= 0, slice_floor_rel >= 0.
  void validate() const;
};

struct TrajectorySample {
  double tau = 0.0;
  double norm_total = 0.0;    // ||w||_{Bz L2(m)}, all components
  double norm_planar = 0.0;   // ||w^xi||
  double norm_axial = 0.0;    // ||w^z||
  double norm_dz_axial = 0.0;   // ||dz w^z||, unscaled axial derivative
  double norm_zweighted = 0.0;  // ||rho(z) w^z||, chordal axial weight
  double norm_grad = 0.0;       // ||bar-grad w||, scaled gradient, 9 components
  double circulation = 0.0;     // axial mass, analytic channel included
  double divergence_sup = 0.0;  // sup of the scaled divergence
  double dealias_tail = 0.0;    // worst spectral mass fraction outside the band
  double zeta_tail = 0.0;       // norm-squared fraction in the top ladder slice
};

struct Trajectory {
  double alpha = 0.0;
  std::string gauge;
  EvolutionControls controls;
  std::vector<TrajectorySample> samples;
};

// Monitor row for the current state (gauge-aware circulation).
TrajectorySample sample_state(const VorticityState& w);

// Quadratic transport/stretch terms (and core-gauge column couplings) at the
// state's own tau; the linear part L + e^tau dzz is not included (it is
// integrated exactly by the stepper).
VorticityState nonlinear_rhs(const VorticityState& w);

// One integrating-factor Heun step of size dt from w.tau.
void step_nonlinear(VorticityState& w, double dt, const EvolutionControls& ctl);

// Called with (step, state) at step 0 and after every step.
using Observer = std::function<void(int, const VorticityState&)>;

// Evolve w in place to tau_end, sampling every record_every steps (plus the
// first and last).  Throws std::runtime_error when the norm exceeds
// ctl.max_norm or stops being finite.
Trajectory evolve(VorticityState& w, double tau_end,
                  const EvolutionControls& ctl, const Observer& observer = {});

// Same, but requires (and preserves) the core gauge: the evolved field is the
// perturbation about the alpha-column and its axial slice-0 mean is pinned to
// zero after every step.
Trajectory evolve_core(VorticityState& w, double tau_end,
                       const EvolutionControls& ctl,
                       const Observer& observer = {});

// Purely planar dynamics of an axial vorticity plane (the axially constant
// reduction of the full system, run through the identical code path on a
// ladder of height zero).
struct PlaneSample {
  double tau = 0.0;
  double norm = 0.0;  // weighted planar L2(m)
  double mass = 0.0;
};
struct PlaneRun {
  std::vector<PlaneSample> samples;
  Plane final;
};
PlaneRun evolve_2d(const Grid& g, const Plane& w0, double tau0, double tau_end,
                   const EvolutionControls& ctl);

// Defect of the mild (Duhamel) form over a window of equally spaced states:
//   w(tau_n) - S0(tau_n, tau_0) w(tau_0)
//           - int_{tau_0}^{tau_n} S0(tau_n, s) N(w(s)) ds
// with the integral evaluated by composite Simpson on the given states.
// Requires an odd count >= 9 of equally spaced states.
struct MildResidualReport {
  double tau0 = 0.0;
  double tau1 = 0.0;
  int nodes = 0;
  double residual = 0.0;    // Bz L2(m) norm of the defect
  double state_norm = 0.0;  // norm of the final state
  double relative = 0.0;    // residual / max(state_norm, tiny)
  double tolerance = 0.0;
  bool pass = false;
};
MildResidualReport mild_residual(const std::vector<VorticityState>& states,
                                 double tolerance);

}  // namespace oseenlab
