#include "oseenlab/field_ops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace oseenlab {

namespace {

using cplx = std::complex<double>;

// All FFTW planning and scratch-buffer execution is serialized: plans share
// cached scratch arrays, and the FFTW planner itself is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// In-place c2c transforms of one N x N plane, planned once per size on an
// owned scratch buffer.  FFTW_ESTIMATE keeps plan selection (and therefore
// floating-point results) reproducible across runs; MEASURE may pick a
// different algorithm each run and break bit-identical reruns.
struct PlaneTransform {
  int n = 0;
  std::vector<cplx> buf;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit PlaneTransform(int N) : n(N), buf(static_cast<size_t>(N) * N) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_2d(N, N, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(N, N, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw std::runtime_error("FFTW plane planning failed");
  }
  ~PlaneTransform() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  PlaneTransform(const PlaneTransform&) = delete;
  PlaneTransform& operator=(const PlaneTransform&) = delete;
};

PlaneTransform& plane_transform(int N) {
  static std::map<int, std::unique_ptr<PlaneTransform>> cache;
  auto it = cache.find(N);
  if (it == cache.end())
    it = cache.emplace(N, std::make_unique<PlaneTransform>(N)).first;
  return *it->second;
}

// Batched axial lines: `count` independent length-Mz r2c/c2r transforms,
// laid out column-major (line index fastest) to match Eigen arrays.
struct LineTransform {
  int count = 0, mz = 0;
  std::vector<double> real_buf;           // count x Mz
  std::vector<cplx> cplx_buf;             // count x (Mz/2 + 1)
  fftw_plan r2c = nullptr, c2r = nullptr;

  LineTransform(int count_, int Mz)
      : count(count_),
        mz(Mz),
        real_buf(static_cast<size_t>(count_) * Mz),
        cplx_buf(static_cast<size_t>(count_) * (Mz / 2 + 1)) {
    auto* cp = reinterpret_cast<fftw_complex*>(cplx_buf.data());
    const int n[1] = {Mz};
    r2c = fftw_plan_many_dft_r2c(1, n, count, real_buf.data(), nullptr, count, 1,
                                 cp, nullptr, count, 1, FFTW_ESTIMATE);
    c2r = fftw_plan_many_dft_c2r(1, n, count, cp, nullptr, count, 1,
                                 real_buf.data(), nullptr, count, 1, FFTW_ESTIMATE);
    if (!r2c || !c2r) throw std::runtime_error("FFTW line planning failed");
  }
  ~LineTransform() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  LineTransform(const LineTransform&) = delete;
  LineTransform& operator=(const LineTransform&) = delete;
};

LineTransform& line_transform(int count, int Mz) {
  static std::map<std::pair<int, int>, std::unique_ptr<LineTransform>> cache;
  const auto key = std::make_pair(count, Mz);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<LineTransform>(count, Mz)).first;
  return *it->second;
}

void check_plane(const Grid& g, const Plane& p, const char* where) {
  if (p.rows() != g.N_xi || p.cols() != g.N_xi)
    throw std::invalid_argument(std::string(where) + ": plane does not match grid");
}

}  // namespace

void xi_to_spectral(const Grid& g, Plane& plane) {
  check_plane(g, plane, "xi_to_spectral");
  const int N = g.N_xi;
  std::lock_guard<std::mutex> lock(fftw_mutex());
  PlaneTransform& T = plane_transform(N);
  std::copy(plane.data(), plane.data() + static_cast<size_t>(N) * N, T.buf.data());
  fftw_execute(T.fwd);
  const double scale = 1.0 / (static_cast<double>(N) * N);
  cplx* out = plane.data();
  for (size_t i = 0; i < T.buf.size(); ++i) out[i] = T.buf[i] * scale;
}

void xi_to_physical(const Grid& g, Plane& plane) {
  check_plane(g, plane, "xi_to_physical");
  const int N = g.N_xi;
  std::lock_guard<std::mutex> lock(fftw_mutex());
  PlaneTransform& T = plane_transform(N);
  std::copy(plane.data(), plane.data() + static_cast<size_t>(N) * N, T.buf.data());
  fftw_execute(T.bwd);
  std::copy(T.buf.begin(), T.buf.end(), plane.data());
}

Plane xi_derivative(const Grid& g, const Plane& phys, int dir) {
  if (dir != 0 && dir != 1) throw std::invalid_argument("xi_derivative: dir must be 0 or 1");
  Plane t = phys;
  xi_to_spectral(g, t);
  const int N = g.N_xi;
  for (int s2 = 0; s2 < N; ++s2) {
    for (int s1 = 0; s1 < N; ++s1) {
      const int s = dir == 0 ? s1 : s2;
      // Nyquist slot carries no usable odd-derivative information.
      const double k = (g.signed_index(s) == -N / 2) ? 0.0 : g.k(s);
      t(s1, s2) *= cplx(0.0, k);
    }
  }
  xi_to_physical(g, t);
  return t;
}

void xi_gradient(const Grid& g, const Plane& phys, Plane& d1, Plane& d2) {
  Plane spec = phys;
  xi_to_spectral(g, spec);
  const int N = g.N_xi;
  d1.resize(N, N);
  d2.resize(N, N);
  for (int s2 = 0; s2 < N; ++s2) {
    const double k2 = (g.signed_index(s2) == -N / 2) ? 0.0 : g.k(s2);
    for (int s1 = 0; s1 < N; ++s1) {
      const double k1 = (g.signed_index(s1) == -N / 2) ? 0.0 : g.k(s1);
      d1(s1, s2) = spec(s1, s2) * cplx(0.0, k1);
      d2(s1, s2) = spec(s1, s2) * cplx(0.0, k2);
    }
  }
  xi_to_physical(g, d1);
  xi_to_physical(g, d2);
}

SpectralField xi_derivative(const SpectralField& f, int dir) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int j = 0; j < g.ladder_size(); ++j) {
    if (f.slice(j).cwiseAbs().maxCoeff() == 0.0) continue;
    out.slice(j) = xi_derivative(g, f.slice(j), dir);
  }
  return out;
}

Plane xi_laplacian(const Grid& g, const Plane& phys) {
  Plane t = phys;
  xi_to_spectral(g, t);
  const int N = g.N_xi;
  for (int s2 = 0; s2 < N; ++s2) {
    const double k2 = g.k(s2);
    for (int s1 = 0; s1 < N; ++s1) {
      const double k1 = g.k(s1);
      t(s1, s2) *= -(k1 * k1 + k2 * k2);
    }
  }
  xi_to_physical(g, t);
  return t;
}

void apply_dealias_mask(const Grid& g, Plane& phys) {
  Plane t = phys;
  xi_to_spectral(g, t);
  const int N = g.N_xi;
  for (int s2 = 0; s2 < N; ++s2)
    for (int s1 = 0; s1 < N; ++s1)
      if (!g.mode_kept(s1, s2)) t(s1, s2) = 0.0;
  xi_to_physical(g, t);
  phys = std::move(t);
}

void apply_dealias_mask(const Grid& g, SpectralField& f) {
  for (int j = 0; j < f.ladder_size(); ++j) {
    // Axially damped slices underflow to exact zero rather than paying FFTs.
    if (f.slice(j).cwiseAbs().maxCoeff() < 1e-250) {
      f.slice(j).setZero();
      continue;
    }
    apply_dealias_mask(g, f.slice(j));
  }
}

double dealias_tail_fraction(const Grid& g, const Plane& phys) {
  Plane t = phys;
  xi_to_spectral(g, t);
  const int N = g.N_xi;
  double inside = 0.0, outside = 0.0;
  for (int s2 = 0; s2 < N; ++s2)
    for (int s1 = 0; s1 < N; ++s1) {
      const double a2 = std::norm(t(s1, s2));
      (g.mode_kept(s1, s2) ? inside : outside) += a2;
    }
  const double total = inside + outside;
  return total > 0.0 ? outside / total : 0.0;
}

SpectralField dz_scaled(const SpectralField& f, double tau) {
  const Grid& g = f.grid();
  SpectralField out(g);
  const double lam = std::exp(0.5 * tau);
  for (int j = 0; j < f.ladder_size(); ++j)
    out.slice(j) = cplx(0.0, lam * g.zeta(j)) * f.slice(j);
  return out;
}

SpectralField scaled_divergence(const VorticityState& w) {
  const Grid& g = w.grid;
  SpectralField out(g);
  const double lam = std::exp(0.5 * w.tau);
  for (int j = 0; j < out.ladder_size(); ++j) {
    out.slice(j) = xi_derivative(g, w.wxi1.slice(j), 0) +
                   xi_derivative(g, w.wxi2.slice(j), 1) +
                   cplx(0.0, lam * g.zeta(j)) * w.wz.slice(j);
  }
  return out;
}

double scaled_divergence_sup(const VorticityState& w) {
  return scaled_divergence(w).max_abs();
}

void project_div_free(VorticityState& w) {
  const Grid& g = w.grid;
  const int N = g.N_xi;
  const double lam = std::exp(0.5 * w.tau);
  for (int j = 0; j < g.ladder_size(); ++j) {
    Plane p1 = w.wxi1.slice(j), p2 = w.wxi2.slice(j), p3 = w.wz.slice(j);
    xi_to_spectral(g, p1);
    xi_to_spectral(g, p2);
    xi_to_spectral(g, p3);
    const double d3 = lam * g.zeta(j);
    for (int s2 = 0; s2 < N; ++s2) {
      const double d2 = g.k(s2);
      for (int s1 = 0; s1 < N; ++s1) {
        const double d1 = g.k(s1);
        const double dd = d1 * d1 + d2 * d2 + d3 * d3;
        if (dd == 0.0) continue;
        const cplx dot = (d1 * p1(s1, s2) + d2 * p2(s1, s2) + d3 * p3(s1, s2)) / dd;
        p1(s1, s2) -= d1 * dot;
        p2(s1, s2) -= d2 * dot;
        p3(s1, s2) -= d3 * dot;
      }
    }
    xi_to_physical(g, p1);
    xi_to_physical(g, p2);
    xi_to_physical(g, p3);
    w.wxi1.slice(j) = std::move(p1);
    w.wxi2.slice(j) = std::move(p2);
    w.wz.slice(j) = std::move(p3);
  }
  w.wxi1.enforce_real_slice0();
  w.wxi2.enforce_real_slice0();
  w.wz.enforce_real_slice0();
}

std::complex<double> slice0_mean(const SpectralField& f) {
  return f.slice(0).mean();
}

double field_mass(const SpectralField& f) {
  return f.grid().box_area() * slice0_mean(f).real();
}

void remove_axial_mass(SpectralField& f) {
  const Grid& g = f.grid();
  Plane bump(g.N_xi, g.N_xi);
  for (int i2 = 0; i2 < g.N_xi; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < g.N_xi; ++i1) {
      const double x1 = g.xi(i1);
      bump(i1, i2) = std::exp(-0.25 * (x1 * x1 + x2 * x2));
    }
  }
  // Scale by the lattice mean so the removal is exact on the lattice.
  const std::complex<double> m = slice0_mean(f);
  const double bm = bump.real().mean();
  f.slice(0) -= (m / bm) * bump;
}

int good_fft_length(int n) {
  if (n < 1) throw std::invalid_argument("good_fft_length: n must be positive");
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

int padded_z_length(const Grid& g) {
  return good_fft_length(3 * g.N_z + 1);
}

Eigen::ArrayXXd z_physical_lines(const SpectralField& f, int Mz) {
  const Grid& g = f.grid();
  if (Mz < 2 * g.N_z + 1)
    throw std::invalid_argument("z_physical_lines: Mz too short for the ladder");
  const int count = g.N_xi * g.N_xi;
  const int hmax = Mz / 2;  // complex slots 0..hmax
  std::lock_guard<std::mutex> lock(fftw_mutex());
  LineTransform& T = line_transform(count, Mz);
  std::fill(T.cplx_buf.begin(), T.cplx_buf.end(), cplx(0.0, 0.0));
  for (int j = 0; j <= g.N_z && j <= hmax; ++j) {
    const cplx* src = f.slice(j).data();
    cplx* dst = T.cplx_buf.data() + static_cast<size_t>(j) * count;
    std::copy(src, src + count, dst);
  }
  fftw_execute(T.c2r);
  Eigen::ArrayXXd lines(count, Mz);
  std::copy(T.real_buf.begin(), T.real_buf.end(), lines.data());
  return lines;
}

SpectralField field_from_z_lines(const Grid& g, const Eigen::ArrayXXd& lines, int Mz) {
  const int count = g.N_xi * g.N_xi;
  if (lines.rows() != count || lines.cols() != Mz)
    throw std::invalid_argument("field_from_z_lines: line array does not match grid");
  if (Mz < 2 * g.N_z + 1)
    throw std::invalid_argument("field_from_z_lines: Mz too short for the ladder");
  std::lock_guard<std::mutex> lock(fftw_mutex());
  LineTransform& T = line_transform(count, Mz);
  std::copy(lines.data(), lines.data() + static_cast<size_t>(count) * Mz,
            T.real_buf.data());
  fftw_execute(T.r2c);
  SpectralField out(g);
  const double scale = 1.0 / Mz;
  for (int j = 0; j <= g.N_z; ++j) {
    const cplx* src = T.cplx_buf.data() + static_cast<size_t>(j) * count;
    cplx* dst = out.slice(j).data();
    for (int p = 0; p < count; ++p) dst[p] = src[p] * scale;
  }
  out.enforce_real_slice0();
  return out;
}

SpectralField multiply_fields(const SpectralField& a, const SpectralField& b,
                              bool dealias) {
  const Grid& g = a.grid();
  if (!g.same_layout(b.grid()))
    throw std::invalid_argument("multiply_fields: grids differ");
  const int Mz = padded_z_length(g);
  Eigen::ArrayXXd la = z_physical_lines(a, Mz);
  la *= z_physical_lines(b, Mz);
  SpectralField out = field_from_z_lines(g, la, Mz);
  if (dealias) apply_dealias_mask(g, out);
  return out;
}

}  // namespace oseenlab
