#include "oseenlab/selfsim.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "oseenlab/resample.hpp"

namespace oseenlab {

double a_of_tau(double tau) {
  if (tau <= 0.0)
    throw std::domain_error("a_of_tau: defined for tau > 0 only");
  return 1.0 / (1.0 - std::exp(-tau));
}

double gauss_profile(double x1, double x2) {
  return std::exp(-0.25 * (x1 * x1 + x2 * x2)) / (4.0 * kPi);
}

Eigen::Vector2d gauss_profile_gradient(double x1, double x2) {
  const double G = gauss_profile(x1, x2);
  return {-0.5 * x1 * G, -0.5 * x2 * G};
}

namespace {

// Swirl magnitude h(s) with v_G = h(|xi|^2) xi_perp,
//   h(s) = (1 - e^{-s/4}) / (2 pi s),
// and its derivative; both switch to the Taylor series near s = 0.
constexpr double kSeriesS = 1e-6;

double swirl_h(double s) {
  if (s < kSeriesS)
    return (0.25 - s / 32.0 + s * s / 384.0 - s * s * s / 6144.0) / (2.0 * kPi);
  return (1.0 - std::exp(-0.25 * s)) / (2.0 * kPi * s);
}

double swirl_h_prime(double s) {
  if (s < kSeriesS)
    return (-1.0 / 32.0 + s / 192.0 - s * s / 2048.0 + s * s * s / 30720.0) /
           (2.0 * kPi);
  const double e = std::exp(-0.25 * s);
  return -(1.0 - e) / (2.0 * kPi * s * s) + e / (8.0 * kPi * s);
}

}  // namespace

Eigen::Vector2d gauss_swirl(double x1, double x2) {
  const double h = swirl_h(x1 * x1 + x2 * x2);
  return {-h * x2, h * x1};
}

Eigen::Matrix2d gauss_swirl_jacobian(double x1, double x2) {
  const double s = x1 * x1 + x2 * x2;
  const double h = swirl_h(s);
  const double hp = swirl_h_prime(s);
  // d_j v_i = 2 h'(s) xi_j xi_perp_i + h J_ij with J = [[0,-1],[1,0]].
  Eigen::Matrix2d out;
  out(0, 0) = 2.0 * hp * x1 * (-x2);
  out(0, 1) = 2.0 * hp * x2 * (-x2) - h;
  out(1, 0) = 2.0 * hp * x1 * x1 + h;
  out(1, 1) = 2.0 * hp * x2 * x1;
  return out;
}

Plane oseen_vorticity(const Grid& g, double alpha) {
  Plane out(g.N_xi, g.N_xi);
  for (int i2 = 0; i2 < g.N_xi; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < g.N_xi; ++i1)
      out(i1, i2) = alpha * gauss_profile(g.xi(i1), x2);
  }
  return out;
}

void oseen_velocity(const Grid& g, double alpha, Plane& v1, Plane& v2) {
  v1.resize(g.N_xi, g.N_xi);
  v2.resize(g.N_xi, g.N_xi);
  for (int i2 = 0; i2 < g.N_xi; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < g.N_xi; ++i1) {
      const Eigen::Vector2d v = alpha * gauss_swirl(g.xi(i1), x2);
      v1(i1, i2) = v(0);
      v2(i1, i2) = v(1);
    }
  }
}

const OseenSamples& oseen_samples(const Grid& g) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, std::unique_ptr<OseenSamples>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(g.L_xi, g.N_xi);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto s = std::make_unique<OseenSamples>();
  const int N = g.N_xi;
  for (Plane* p : {&s->g, &s->dg1, &s->dg2, &s->vg1, &s->vg2, &s->dvg11,
                   &s->dvg12, &s->dvg21, &s->dvg22})
    p->resize(N, N);
  for (int i2 = 0; i2 < N; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < N; ++i1) {
      const double x1 = g.xi(i1);
      s->g(i1, i2) = gauss_profile(x1, x2);
      const Eigen::Vector2d dg = gauss_profile_gradient(x1, x2);
      s->dg1(i1, i2) = dg(0);
      s->dg2(i1, i2) = dg(1);
      const Eigen::Vector2d v = gauss_swirl(x1, x2);
      s->vg1(i1, i2) = v(0);
      s->vg2(i1, i2) = v(1);
      const Eigen::Matrix2d dv = gauss_swirl_jacobian(x1, x2);
      s->dvg11(i1, i2) = dv(0, 0);
      s->dvg12(i1, i2) = dv(0, 1);
      s->dvg21(i1, i2) = dv(1, 0);
      s->dvg22(i1, i2) = dv(1, 1);
    }
  }
  it = cache.emplace(key, std::move(s)).first;
  return *it->second;
}

double CoordinateMap::tau_of_t(double t) const {
  if (t <= 0.0) throw std::domain_error("tau_of_t: requires t > 0");
  return std::log(t);
}

namespace {

void check_axial_compat(const Grid& a, const Grid& b, const char* where) {
  if (a.N_z != b.N_z || a.z_period != b.z_period)
    throw std::invalid_argument(std::string(where) +
                                ": axial ladders of the two grids differ");
}

}  // namespace

VorticityState to_selfsim(const PhysicalSnapshot& snap, const Grid& g,
                          bool* aliasing_flagged) {
  snap.grid.validate();
  g.validate();
  check_axial_compat(snap.grid, g, "to_selfsim");
  if (snap.t <= 0.0) throw std::domain_error("to_selfsim: requires t > 0");
  const double scale = std::sqrt(snap.t);
  if (aliasing_flagged) *aliasing_flagged = false;
  VorticityState w(g, std::log(snap.t), 0.0, Gauge::full);
  for (int c = 0; c < 3; ++c) {
    const SpectralField& src = c == 0 ? snap.wxi1 : (c == 1 ? snap.wxi2 : snap.wz);
    SpectralField& dst = w.component(c);
    for (int j = 0; j < g.ladder_size(); ++j) {
      bool flagged = false;
      dst.slice(j) = snap.t * resample_plane(snap.grid, src.slice(j), g, scale, &flagged);
      if (flagged && aliasing_flagged) *aliasing_flagged = true;
    }
  }
  w.wxi1.enforce_real_slice0();
  w.wxi2.enforce_real_slice0();
  w.wz.enforce_real_slice0();
  return w;
}

PhysicalSnapshot from_selfsim(const VorticityState& w, const Grid& physical_grid,
                              bool* aliasing_flagged) {
  w.grid.validate();
  physical_grid.validate();
  check_axial_compat(w.grid, physical_grid, "from_selfsim");
  const double t = std::exp(w.tau);
  const double inv_scale = 1.0 / std::sqrt(t);
  if (aliasing_flagged) *aliasing_flagged = false;
  PhysicalSnapshot snap;
  snap.grid = physical_grid;
  snap.t = t;
  snap.wxi1 = SpectralField(physical_grid);
  snap.wxi2 = SpectralField(physical_grid);
  snap.wz = SpectralField(physical_grid);
  for (int c = 0; c < 3; ++c) {
    const SpectralField& src = w.component(c);
    SpectralField& dst = c == 0 ? snap.wxi1 : (c == 1 ? snap.wxi2 : snap.wz);
    for (int j = 0; j < physical_grid.ladder_size(); ++j) {
      bool flagged = false;
      dst.slice(j) =
          (1.0 / t) * resample_plane(w.grid, src.slice(j), physical_grid, inv_scale, &flagged);
      if (flagged && aliasing_flagged) *aliasing_flagged = true;
    }
  }
  snap.wxi1.enforce_real_slice0();
  snap.wxi2.enforce_real_slice0();
  snap.wz.enforce_real_slice0();
  return snap;
}

}  // namespace oseenlab
