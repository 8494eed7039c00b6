#include "oseenlab/biot_savart.hpp"

#include <cmath>
#include <stdexcept>

#include "oseenlab/field_ops.hpp"
#include "oseenlab/norms.hpp"
#include "oseenlab/selfsim.hpp"

namespace oseenlab {

namespace {

using cplx = std::complex<double>;

constexpr double kMassStrict = 1e-12;

// Lattice mass coefficient against the column profile: c such that
// f - c * G has exactly zero xi-mean on ladder slice 0.
double column_mass_coefficient(const Grid& g, const SpectralField& f) {
  const OseenSamples& os = oseen_samples(g);
  const double gmass = g.box_area() * os.g.real().mean();
  return field_mass(f) / gmass;
}

}  // namespace

SpectralField inv_laplacian_scaled(const SpectralField& f, double tau,
                                   InvLaplacianStats* stats) {
  const Grid& g = f.grid();
  const double etau = std::exp(tau);
  SpectralField out(g);
  if (stats) *stats = InvLaplacianStats{};
  for (int j = 0; j < f.ladder_size(); ++j) {
    if (f.slice(j).cwiseAbs().maxCoeff() == 0.0) continue;
    Plane p = f.slice(j);
    xi_to_spectral(g, p);
    const double zz = etau * g.zeta(j) * g.zeta(j);
    for (int s2 = 0; s2 < g.N_xi; ++s2) {
      const double k2 = g.k(s2);
      for (int s1 = 0; s1 < g.N_xi; ++s1) {
        const double k1 = g.k(s1);
        const double denom = k1 * k1 + k2 * k2 + zz;
        if (denom == 0.0) {
          if (stats) {
            stats->excluded_mass = std::abs(p(s1, s2)) * g.box_area();
            stats->flagged = stats->excluded_mass > kMassStrict;
          }
          p(s1, s2) = 0.0;
        } else {
          p(s1, s2) /= denom;
        }
      }
    }
    xi_to_physical(g, p);
    out.slice(j) = std::move(p);
  }
  return out;
}

VelocityState velocity_from_vorticity(const VorticityState& w) {
  const double mass = field_mass(w.wz);
  if (std::abs(mass) > kMassStrict)
    throw std::invalid_argument(
        "velocity_from_vorticity: the axial component carries mass " +
        std::to_string(mass) +
        " at the (zeta=0, k=0) mode, which the lattice inversion cannot "
        "represent; route the column through velocity_core / velocity_total");

  const Grid& g = w.grid;
  const double etau = std::exp(w.tau);
  const double lam = std::exp(0.5 * w.tau);
  VelocityState v(g, w.tau);
  for (int j = 0; j < g.ladder_size(); ++j) {
    const double zeta = g.zeta(j);
    const bool empty = w.wxi1.slice(j).cwiseAbs().maxCoeff() == 0.0 &&
                       w.wxi2.slice(j).cwiseAbs().maxCoeff() == 0.0 &&
                       w.wz.slice(j).cwiseAbs().maxCoeff() == 0.0;
    if (empty) continue;
    Plane w1 = w.wxi1.slice(j), w2 = w.wxi2.slice(j), w3 = w.wz.slice(j);
    xi_to_spectral(g, w1);
    xi_to_spectral(g, w2);
    xi_to_spectral(g, w3);
    Plane v1(g.N_xi, g.N_xi), v2(g.N_xi, g.N_xi), v3(g.N_xi, g.N_xi);
    const double zz = etau * zeta * zeta;
    for (int s2 = 0; s2 < g.N_xi; ++s2) {
      const double k2 = g.k(s2);
      for (int s1 = 0; s1 < g.N_xi; ++s1) {
        const double k1 = g.k(s1);
        const double denom = k1 * k1 + k2 * k2 + zz;
        if (denom == 0.0) {
          v1(s1, s2) = v2(s1, s2) = v3(s1, s2) = 0.0;
          continue;
        }
        const cplx f1 = w1(s1, s2) / denom;
        const cplx f2 = w2(s1, s2) / denom;
        const cplx f3 = w3(s1, s2) / denom;
        const cplx i(0.0, 1.0);
        v1(s1, s2) = -i * lam * zeta * f2 + i * k2 * f3;
        v2(s1, s2) = i * lam * zeta * f1 - i * k1 * f3;
        v3(s1, s2) = i * k1 * f2 - i * k2 * f1;
      }
    }
    xi_to_physical(g, v1);
    xi_to_physical(g, v2);
    xi_to_physical(g, v3);
    v.vxi1.slice(j) = std::move(v1);
    v.vxi2.slice(j) = std::move(v2);
    v.vz.slice(j) = std::move(v3);
  }
  v.vxi1.enforce_real_slice0();
  v.vxi2.enforce_real_slice0();
  v.vz.enforce_real_slice0();
  return v;
}

VelocityState velocity_core(const VorticityState& w_core) {
  if (w_core.gauge != Gauge::core)
    throw std::invalid_argument("velocity_core: state is not in the core gauge");
  const Grid& g = w_core.grid;
  // Any residual perturbation mass rides the analytic channel together with
  // the column's own alpha.
  const double c = column_mass_coefficient(g, w_core.wz);
  VorticityState demassed = w_core;
  if (c != 0.0)
    demassed.wz.slice(0) -= c * oseen_samples(g).g;
  VelocityState v = velocity_from_vorticity(demassed);
  v.oseen_coeff = w_core.alpha + c;
  return v;
}

VelocityState velocity_total(const VorticityState& w) {
  if (w.gauge == Gauge::core) return velocity_core(w);
  const Grid& g = w.grid;
  const double c = column_mass_coefficient(g, w.wz);
  VorticityState demassed = w;
  if (c != 0.0)
    demassed.wz.slice(0) -= c * oseen_samples(g).g;
  VelocityState v = velocity_from_vorticity(demassed);
  v.oseen_coeff = c;
  return v;
}

void planar_velocity(const Grid& g, const Plane& f, Plane& v1, Plane& v2,
                     std::complex<double>* channel) {
  const OseenSamples& os = oseen_samples(g);
  const double gmass = g.box_area() * os.g.real().mean();
  const cplx c = f.mean() * g.box_area() / gmass;
  if (channel) *channel = c;
  Plane p = f - c * os.g;
  xi_to_spectral(g, p);
  v1.resize(g.N_xi, g.N_xi);
  v2.resize(g.N_xi, g.N_xi);
  for (int s2 = 0; s2 < g.N_xi; ++s2) {
    const double k2 = g.k(s2);
    for (int s1 = 0; s1 < g.N_xi; ++s1) {
      const double k1 = g.k(s1);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) {
        v1(s1, s2) = v2(s1, s2) = 0.0;
        continue;
      }
      const cplx i(0.0, 1.0);
      const cplx phi = p(s1, s2) / kk;
      v1(s1, s2) = i * k2 * phi;
      v2(s1, s2) = -i * k1 * phi;
    }
  }
  xi_to_physical(g, v1);
  xi_to_physical(g, v2);
}

double biot_savart_difference_multiplier(double tau, double zeta, double k_sq) {
  if (k_sq <= 0.0)
    throw std::invalid_argument(
        "biot_savart_difference_multiplier: requires |k|^2 > 0");
  const double zz = std::exp(tau) * zeta * zeta;
  return zz / (k_sq * (k_sq + zz));
}

std::vector<BiotSavartDifferenceSlice> biot_savart_difference(
    const SpectralField& f, double tau, double delta) {
  const Grid& g = f.grid();
  const double etau = std::exp(tau);
  const double lam = std::exp(0.5 * tau);
  std::vector<BiotSavartDifferenceSlice> out;
  for (int j = 1; j < f.ladder_size(); ++j) {
    const double zeta = g.zeta(j);
    BiotSavartDifferenceSlice r;
    r.zeta_index = j;

    Plane spec = f.slice(j);
    xi_to_spectral(g, spec);
    const double zz = etau * zeta * zeta;

    Plane gd1(g.N_xi, g.N_xi), gd2(g.N_xi, g.N_xi);  // grad of the difference
    Plane dz_inv(g.N_xi, g.N_xi);                    // dz_bar Lap_bar^{-1}
    Plane dzg1(g.N_xi, g.N_xi), dzg2(g.N_xi, g.N_xi);  // dz_bar grad Lap_bar^{-1}
    for (int s2 = 0; s2 < g.N_xi; ++s2) {
      const double k2 = g.k(s2);
      for (int s1 = 0; s1 < g.N_xi; ++s1) {
        const double k1 = g.k(s1);
        const double kk = k1 * k1 + k2 * k2;
        const cplx i(0.0, 1.0);
        const cplx c = spec(s1, s2);
        if (kk == 0.0) {
          // xi-mean per slice: the planar inversion is undefined there, so
          // the difference is taken over mean-free content only.
          gd1(s1, s2) = gd2(s1, s2) = 0.0;
          dz_inv(s1, s2) = (zz > 0.0) ? cplx(i * lam * zeta / zz) * c : cplx(0.0);
          dzg1(s1, s2) = dzg2(s1, s2) = 0.0;
          continue;
        }
        const double diff = zz / (kk * (kk + zz));
        gd1(s1, s2) = i * k1 * diff * c;
        gd2(s1, s2) = i * k2 * diff * c;
        const cplx inv = c / (kk + zz);
        dz_inv(s1, s2) = i * lam * zeta * inv;
        dzg1(s1, s2) = i * k1 * i * lam * zeta * inv;
        dzg2(s1, s2) = i * k2 * i * lam * zeta * inv;
      }
    }
    for (Plane* p : {&gd1, &gd2, &dz_inv, &dzg1, &dzg2}) xi_to_physical(g, *p);

    r.grad_diff_sup = weighted_lp_norm(
        g, std::vector<const Plane*>{&gd1, &gd2}, kPInf, 0.0);
    r.dz_inv_sup = weighted_lp_norm(g, dz_inv, kPInf, 0.0);
    r.dz_grad_inv_l2 = weighted_lp_norm(
        g, std::vector<const Plane*>{&dzg1, &dzg2}, 2.0, 0.0);
    const double fnorm = weighted_lp_norm(g, f.slice(j), 2.0, g.weight_m);
    r.envelope = std::pow(lam, 1.0 - 2.0 * delta) *
                 std::pow(std::abs(zeta), 1.0 - 2.0 * delta) * fnorm;
    out.push_back(r);
  }
  return out;
}

}  // namespace oseenlab
