#include "oseenlab/resample.hpp"

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

#include "oseenlab/field_ops.hpp"

namespace oseenlab {

namespace {

using cplx = std::complex<double>;

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

// Analysis matrix of the trigonometric interpolant on grid g:
// (A f)_s = coefficient of e^{i k_s xi} (phases included, so synthesis at
// arbitrary points is plain exponentials).
Eigen::MatrixXcd analysis_matrix(const Grid& g) {
  const int N = g.N_xi;
  Eigen::MatrixXcd A(N, N);
  for (int i = 0; i < N; ++i) {
    const double x = g.xi(i);
    for (int s = 0; s < N; ++s)
      A(s, i) = std::exp(cplx(0.0, -g.k(s) * x)) / static_cast<double>(N);
  }
  return A;
}

// One-direction lattice generator L1 = D2 + diag(xi)/2 D1 + I/2 with the
// spectral derivative matrices of the interpolant.  The Nyquist slot carries
// a pure cosine whose sampled first derivative vanishes on the grid, so its
// D1 column is zeroed (the symmetric convention that keeps D1 real).
Eigen::MatrixXd fp_generator(const Grid& g) {
  const int N = g.N_xi;
  const Eigen::MatrixXcd A = analysis_matrix(g);
  Eigen::MatrixXcd B1(N, N), B2(N, N);
  for (int s = 0; s < N; ++s) {
    const double k = g.k(s);
    const bool nyquist = g.signed_index(s) == -N / 2;
    for (int j = 0; j < N; ++j) {
      const cplx phase = std::exp(cplx(0.0, k * g.xi(j)));
      B1(j, s) = nyquist ? cplx(0.0, 0.0) : cplx(0.0, k) * phase;
      B2(j, s) = -k * k * phase;
    }
  }
  const Eigen::MatrixXd D1 = (B1 * A).real();
  const Eigen::MatrixXd D2 = (B2 * A).real();
  Eigen::MatrixXd L = D2;
  for (int i = 0; i < N; ++i) L.row(i) += 0.5 * g.xi(i) * D1.row(i);
  L.diagonal().array() += 0.5;
  return L;
}

using GenKey = std::tuple<double, int>;  // L_xi, N_xi
std::map<GenKey, Eigen::MatrixXd>& generator_cache() {
  static std::map<GenKey, Eigen::MatrixXd> c;
  return c;
}

using StepKey = std::tuple<double, int, double>;  // L_xi, N_xi, dtau
std::map<StepKey, Eigen::MatrixXd>& step_cache() {
  static std::map<StepKey, Eigen::MatrixXd> c;
  return c;
}

// src layout, dst layout, scale
using ResampleKey = std::tuple<double, int, double, int, double>;
std::map<ResampleKey, Eigen::MatrixXcd>& resample_cache() {
  static std::map<ResampleKey, Eigen::MatrixXcd> c;
  return c;
}

}  // namespace

const Eigen::MatrixXd& fokker_planck_step_matrix(const Grid& g, double dtau) {
  if (!(dtau >= 0.0))
    throw std::invalid_argument("fokker_planck_step_matrix: dtau must be >= 0");
  std::lock_guard<std::mutex> lock(cache_mutex());
  const StepKey key{g.L_xi, g.N_xi, dtau};
  auto it = step_cache().find(key);
  if (it == step_cache().end()) {
    const GenKey gkey{g.L_xi, g.N_xi};
    auto gen = generator_cache().find(gkey);
    if (gen == generator_cache().end())
      gen = generator_cache().emplace(gkey, fp_generator(g)).first;
    Eigen::MatrixXd E = (dtau * gen->second).exp();
    it = step_cache().emplace(key, std::move(E)).first;
  }
  return it->second;
}

void apply_fokker_planck_step(const Grid& g, Plane& plane, double dtau) {
  if (plane.rows() != g.N_xi || plane.cols() != g.N_xi)
    throw std::invalid_argument(
        "apply_fokker_planck_step: plane does not match grid");
  if (dtau == 0.0) return;
  const Eigen::MatrixXd& M = fokker_planck_step_matrix(g, dtau);
  plane = M * plane * M.transpose();
}

Plane resample_plane(const Grid& src, const Plane& phys, const Grid& dst,
                     double scale, bool* tail_flagged) {
  if (phys.rows() != src.N_xi || phys.cols() != src.N_xi)
    throw std::invalid_argument("resample_plane: plane does not match source grid");
  if (scale == 0.0) throw std::invalid_argument("resample_plane: scale must be nonzero");

  const Eigen::MatrixXcd* M = nullptr;
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    const ResampleKey key{src.L_xi, src.N_xi, dst.L_xi, dst.N_xi, scale};
    auto it = resample_cache().find(key);
    if (it == resample_cache().end()) {
      // Synthesis of the source interpolant at the points scale * xi_dst.
      Eigen::MatrixXcd U(dst.N_xi, src.N_xi);
      for (int s = 0; s < src.N_xi; ++s) {
        const double k = src.k(s);
        for (int j = 0; j < dst.N_xi; ++j)
          U(j, s) = std::exp(cplx(0.0, k * scale * dst.xi(j)));
      }
      it = resample_cache().emplace(key, U * analysis_matrix(src)).first;
    }
    M = &it->second;
  }

  if (tail_flagged) {
    // Source modes that land beyond the destination Nyquist band alias on the
    // destination sampling; report if they carry relative mass.
    Plane spec = phys;
    xi_to_spectral(src, spec);
    const double k_nyq_dst = kPi * dst.N_xi / (2.0 * dst.L_xi);
    double in = 0.0, out = 0.0;
    for (int s2 = 0; s2 < src.N_xi; ++s2)
      for (int s1 = 0; s1 < src.N_xi; ++s1) {
        const double a2 = std::norm(spec(s1, s2));
        const bool fits = std::abs(scale * src.k(s1)) <= k_nyq_dst &&
                          std::abs(scale * src.k(s2)) <= k_nyq_dst;
        (fits ? in : out) += a2;
      }
    const double total = in + out;
    *tail_flagged = total > 0.0 && out > 1e-26 * total;
  }

  return (*M) * phys * M->transpose();
}

void clear_resample_cache() {
  std::lock_guard<std::mutex> lock(cache_mutex());
  heat_cache().clear();
  resample_cache().clear();
}

}  // namespace oseenlab
