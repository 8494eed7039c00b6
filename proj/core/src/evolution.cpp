#include "oseenlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "oseenlab/biot_savart.hpp"
#include "oseenlab/field_ops.hpp"
#include "oseenlab/norms.hpp"
#include "oseenlab/propagators.hpp"
#include "oseenlab/selfsim.hpp"

namespace oseenlab {
namespace {

using cplx = std::complex<double>;

constexpr double kDormant = 1e-250;

double plane_max_abs(const Plane& p) {
  return p.size() == 0 ? 0.0 : p.cwiseAbs().maxCoeff();
}

double state_max_abs(const VorticityState& w) {
  return std::max({w.wxi1.max_abs(), w.wxi2.max_abs(), w.wz.max_abs()});
}

// Axial physical lines of the slice-wise xi-gradient and the scaled axial
// derivative of one component, multiplied against the base lines and
// accumulated with the given sign.
void accumulate_advection(const Grid& g, const SpectralField& field,
                          double tau, int Mz,
                          const Eigen::ArrayXXd base[3], double sign,
                          Eigen::ArrayXXd& acc, SpectralField* d1_out,
                          SpectralField* d2_out) {
  SpectralField d1(g), d2(g);
  for (int j = 0; j < g.ladder_size(); ++j) {
    if (plane_max_abs(field.slice(j)) < kDormant) continue;
    xi_gradient(g, field.slice(j), d1.slice(j), d2.slice(j));
  }
  const SpectralField dz = dz_scaled(field, tau);
  acc += sign * (base[0] * z_physical_lines(d1, Mz));
  acc += sign * (base[1] * z_physical_lines(d2, Mz));
  acc += sign * (base[2] * z_physical_lines(dz, Mz));
  if (d1_out) *d1_out = std::move(d1);
  if (d2_out) *d2_out = std::move(d2);
}

double mass_of_plane(const Grid& g, const Plane& p) {
  return g.cell_area() * p.real().sum();
}

// Chordal axial weight rho(z) = (P/pi) |sin(pi z / P)|: the periodic stand-in
// for |z|, exact near the slab center.
double chordal_z_weight(double z, double period) {
  return period / kPi * std::abs(std::sin(kPi * z / period));
}

double zweighted_axial_norm(const VorticityState& w) {
  const Grid& g = w.grid;
  if (g.N_z == 0 || w.wz.max_abs() == 0.0) return 0.0;
  const int Mz = padded_z_length(g);
  Eigen::ArrayXXd lines = z_physical_lines(w.wz, Mz);
  for (int c = 0; c < Mz; ++c) {
    const double z = g.z_period * c / Mz;
    lines.col(c) *= chordal_z_weight(z, g.z_period);
  }
  const SpectralField zf = field_from_z_lines(g, lines, Mz);
  return bz_norm(zf, 2.0, g.weight_m);
}

void apply_slice_floor(VorticityState& w, double floor_abs) {
  if (!(floor_abs > 0.0)) return;
  for (int c = 0; c < 3; ++c) {
    SpectralField& f = w.component(c);
    for (int j = 0; j < f.ladder_size(); ++j) {
      const double amp = plane_max_abs(f.slice(j));
      if (amp > 0.0 && amp < floor_abs) f.slice(j).setZero();
    }
  }
}

void post_step_cleanup(VorticityState& w, const EvolutionControls& ctl) {
  const Grid& g = w.grid;
  if (ctl.dealias) {
    apply_dealias_mask(g, w.wxi1);
    apply_dealias_mask(g, w.wxi2);
    apply_dealias_mask(g, w.wz);
  }
  if (ctl.projection_each_step) project_div_free(w);
  if (w.gauge == Gauge::core) remove_axial_mass(w.wz);
  w.wxi1.enforce_real_slice0();
  w.wxi2.enforce_real_slice0();
  w.wz.enforce_real_slice0();
}

}  // namespace

void EvolutionControls::validate() const {
  if (!(dt > 0.0) || dt > 0.05) {
    throw std::invalid_argument(
        "evolution controls: dt must lie in (0, 0.05], got " +
        std::to_string(dt));
  }
  if (!(max_norm > 0.0)) {
    throw std::invalid_argument("evolution controls: max_norm must be > 0");
  }
  if (record_every < 1) {
    throw std::invalid_argument("evolution controls: record_every must be >= 1");
  }
  if (snapshot_stride < 0) {
    throw std::invalid_argument(
        "evolution controls: snapshot_stride must be >= 0");
  }
  if (slice_floor_rel < 0.0) {
    throw std::invalid_argument(
        "evolution controls: slice_floor_rel must be >= 0");
  }
}

TrajectorySample sample_state(const VorticityState& w) {
  const Grid& g = w.grid;
  const double m = g.weight_m;
  TrajectorySample s;
  s.tau = w.tau;
  s.norm_total = bz_norm({&w.wxi1, &w.wxi2, &w.wz}, 2.0, m);
  s.norm_planar = bz_norm({&w.wxi1, &w.wxi2}, 2.0, m);
  s.norm_axial = bz_norm(w.wz, 2.0, m);
  s.norm_dz_axial = bz_norm(dz_scaled(w.wz, 0.0), 2.0, m);
  s.norm_zweighted = zweighted_axial_norm(w);
  {
    std::vector<SpectralField> grads;
    grads.reserve(9);
    for (int c = 0; c < 3; ++c) {
      grads.push_back(xi_derivative(w.component(c), 0));
      grads.push_back(xi_derivative(w.component(c), 1));
      grads.push_back(dz_scaled(w.component(c), w.tau));
    }
    std::vector<const SpectralField*> ptrs;
    for (const auto& f : grads) ptrs.push_back(&f);
    s.norm_grad = bz_norm(ptrs, 2.0, m);
  }
  s.circulation = field_mass(w.wz);
  if (w.gauge == Gauge::core) {
    s.circulation += w.alpha * mass_of_plane(g, oseen_samples(g).g);
  }
  s.divergence_sup = scaled_divergence_sup(w);
  double tail = 0.0;
  for (int c = 0; c < 3; ++c) {
    const SpectralField& f = w.component(c);
    for (int j = 0; j < f.ladder_size(); ++j) {
      if (plane_max_abs(f.slice(j)) < kDormant) continue;
      tail = std::max(tail, dealias_tail_fraction(g, f.slice(j)));
    }
  }
  s.dealias_tail = tail;
  if (g.N_z >= 1 && s.norm_total > 0.0) {
    const std::vector<const Plane*> top = {&w.wxi1.slice(g.N_z),
                                           &w.wxi2.slice(g.N_z),
                                           &w.wz.slice(g.N_z)};
    s.zeta_tail = 2.0 * weighted_lp_norm(g, top, 2.0, m) / s.norm_total;
  }
  return s;
}

VorticityState nonlinear_rhs(const VorticityState& w) {
  const Grid& g = w.grid;
  const double tau = w.tau;
  const VelocityState v = velocity_total(w);
  // Perturbation channel coefficient: the analytic Gaussian column carrying
  // the axial mass.  In the core gauge the alpha-column itself is handled by
  // the linear couplings, so only the perturbation's share enters here.
  const double ch =
      w.gauge == Gauge::core ? v.oseen_coeff - w.alpha : v.oseen_coeff;
  const int Mz = padded_z_length(g);

  Eigen::ArrayXXd base_v[3], base_w[3];
  for (int c = 0; c < 3; ++c) {
    base_v[c] = z_physical_lines(v.component(c), Mz);
    base_w[c] = z_physical_lines(w.component(c), Mz);
  }

  const OseenSamples& os = oseen_samples(g);
  VorticityState out(g, tau, w.alpha, w.gauge);
  for (int c = 0; c < 3; ++c) {
    Eigen::ArrayXXd acc =
        Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(g.N_xi) * g.N_xi, Mz);
    SpectralField dw1(g), dw2(g);
    accumulate_advection(g, w.component(c), tau, Mz, base_v, -1.0, acc, &dw1,
                         &dw2);
    accumulate_advection(g, v.component(c), tau, Mz, base_w, +1.0, acc, nullptr,
                         nullptr);
    out.component(c) = field_from_z_lines(g, acc, Mz);

    if (ch != 0.0) {
      SpectralField& oc = out.component(c);
      for (int j = 0; j < g.ladder_size(); ++j) {
        const bool live_w = plane_max_abs(w.component(c).slice(j)) >= kDormant;
        if (live_w) {
          oc.slice(j) -= ch * (os.vg1.array() * dw1.slice(j).array() +
                               os.vg2.array() * dw2.slice(j).array())
                                  .matrix();
        }
        if (c < 2) {
          const Plane& w1 = w.wxi1.slice(j);
          const Plane& w2 = w.wxi2.slice(j);
          if (std::max(plane_max_abs(w1), plane_max_abs(w2)) < kDormant)
            continue;
          const Plane& j1 = c == 0 ? os.dvg11 : os.dvg21;
          const Plane& j2 = c == 0 ? os.dvg12 : os.dvg22;
          oc.slice(j) +=
              ch * (w1.array() * j1.array() + w2.array() * j2.array()).matrix();
        }
      }
    }
  }

  if (w.gauge == Gauge::core) {
    const VorticityState cc = column_coupling(w, v, w.alpha, tau);
    for (int c = 0; c < 3; ++c) out.component(c) += cc.component(c);
  }
  for (int c = 0; c < 3; ++c) {
    apply_dealias_mask(g, out.component(c));
    out.component(c).enforce_real_slice0();
  }
  return out;
}

void step_nonlinear(VorticityState& w, double dt, const EvolutionControls& ctl) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_nonlinear: dt must be > 0");
  const Grid& g = w.grid;
  const double tau = w.tau;
  const VorticityState k1 = nonlinear_rhs(w);
  VorticityState slope(g, tau, w.alpha, w.gauge);
  VorticityState stage(g, tau + dt, w.alpha, w.gauge);
  for (int c = 0; c < 3; ++c) {
    w.component(c) = apply_S0(w.component(c), tau + dt, tau);
    slope.component(c) = apply_S0(k1.component(c), tau + dt, tau);
    stage.component(c) = w.component(c);
    stage.component(c) += dt * slope.component(c);
  }
  const VorticityState k2 = nonlinear_rhs(stage);
  for (int c = 0; c < 3; ++c) {
    w.component(c) += (0.5 * dt) * slope.component(c);
    w.component(c) += (0.5 * dt) * k2.component(c);
  }
  w.tau = tau + dt;
  post_step_cleanup(w, ctl);
}

namespace {

Trajectory evolve_impl(VorticityState& w, double tau_end,
                       const EvolutionControls& ctl, const Observer& observer) {
  ctl.validate();
  if (tau_end < w.tau) {
    throw std::invalid_argument("evolve: tau_end lies before the state's tau");
  }
  Trajectory traj;
  traj.alpha = w.alpha;
  traj.gauge = gauge_name(w.gauge);
  traj.controls = ctl;

  const double span = tau_end - w.tau;
  const int n =
      span == 0.0
          ? 0
          : std::max(1, static_cast<int>(std::ceil(span / ctl.dt - 1e-12)));
  const double dt = n > 0 ? span / n : 0.0;
  const double floor_abs = ctl.slice_floor_rel * state_max_abs(w);

  traj.samples.push_back(sample_state(w));
  if (observer) observer(0, w);
  for (int step = 1; step <= n; ++step) {
    step_nonlinear(w, dt, ctl);
    apply_slice_floor(w, floor_abs);
    const double sup = state_max_abs(w);
    if (!std::isfinite(sup)) {
      throw std::runtime_error("evolve: state became non-finite at tau=" +
                               std::to_string(w.tau));
    }
    if (step % ctl.record_every == 0 || step == n) {
      const TrajectorySample s = sample_state(w);
      if (!(s.norm_total <= ctl.max_norm)) {
        throw std::runtime_error("evolve: norm " + std::to_string(s.norm_total) +
                                 " exceeded max_norm at tau=" +
                                 std::to_string(w.tau));
      }
      traj.samples.push_back(s);
    }
    if (observer) observer(step, w);
  }
  return traj;
}

}  // namespace

Trajectory evolve(VorticityState& w, double tau_end,
                  const EvolutionControls& ctl, const Observer& observer) {
  return evolve_impl(w, tau_end, ctl, observer);
}

Trajectory evolve_core(VorticityState& w, double tau_end,
                       const EvolutionControls& ctl, const Observer& observer) {
  if (w.gauge != Gauge::core) {
    throw std::invalid_argument("evolve_core: state must be in the core gauge");
  }
  return evolve_impl(w, tau_end, ctl, observer);
}

PlaneRun evolve_2d(const Grid& gin, const Plane& w0, double tau0,
                   double tau_end, const EvolutionControls& ctl) {
  Grid g = gin;
  g.N_z = 0;
  g.validate();
  if (w0.rows() != g.N_xi || w0.cols() != g.N_xi) {
    throw std::invalid_argument("evolve_2d: plane does not match the grid");
  }
  VorticityState w(g, tau0, 0.0, Gauge::full);
  w.wz.slice(0) = w0;
  w.wz.enforce_real_slice0();

  const Trajectory traj = evolve_impl(w, tau_end, ctl, {});
  PlaneRun run;
  run.samples.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples) {
    run.samples.push_back({s.tau, s.norm_axial, s.circulation});
  }
  run.final = w.wz.slice(0);
  return run;
}

MildResidualReport mild_residual(const std::vector<VorticityState>& states,
                                 double tolerance) {
  const int count = static_cast<int>(states.size());
  if (count < 9 || count % 2 == 0) {
    throw std::invalid_argument(
        "mild_residual: needs an odd count >= 9 of equally spaced states");
  }
  const Grid& g = states.front().grid;
  const double tau0 = states.front().tau;
  const double tau1 = states.back().tau;
  const double h = (tau1 - tau0) / (count - 1);
  if (!(h > 0.0)) {
    throw std::invalid_argument("mild_residual: states must advance in tau");
  }
  for (int k = 0; k < count; ++k) {
    if (!g.same_layout(states[k].grid)) {
      throw std::invalid_argument("mild_residual: states on different grids");
    }
    const double expected = tau0 + k * h;
    if (std::abs(states[k].tau - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw std::invalid_argument("mild_residual: states not equally spaced");
    }
  }

  // Duhamel reconstruction of the final state from the window.
  VorticityState mild(g, tau1, states.front().alpha, states.front().gauge);
  for (int c = 0; c < 3; ++c) {
    mild.component(c) = apply_S0(states.front().component(c), tau1, tau0);
  }
  for (int k = 0; k < count; ++k) {
    const double weight =
        (k == 0 || k == count - 1) ? h / 3.0 : (k % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    const VorticityState rhs = nonlinear_rhs(states[k]);
    for (int c = 0; c < 3; ++c) {
      SpectralField term = apply_S0(rhs.component(c), tau1, states[k].tau);
      mild.component(c) += weight * term;
    }
  }

  MildResidualReport rep;
  rep.tau0 = tau0;
  rep.tau1 = tau1;
  rep.nodes = count;
  SpectralField d1 = states.back().wxi1;
  d1 -= mild.wxi1;
  SpectralField d2 = states.back().wxi2;
  d2 -= mild.wxi2;
  SpectralField dz = states.back().wz;
  dz -= mild.wz;
  rep.residual = bz_norm({&d1, &d2, &dz}, 2.0, g.weight_m);
  rep.state_norm = bz_norm(
      {&states.back().wxi1, &states.back().wxi2, &states.back().wz}, 2.0,
      g.weight_m);
  rep.relative = rep.residual / std::max(rep.state_norm, 1e-300);
  rep.tolerance = tolerance;
  rep.pass = rep.relative <= tolerance;
  return rep;
}

}  // namespace oseenlab
