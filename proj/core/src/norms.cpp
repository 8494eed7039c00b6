#include "oseenlab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace oseenlab {

namespace {

// Plane of pointwise magnitudes |f| (scalar) or Euclidean magnitudes across
// components (vector).
Eigen::ArrayXXd magnitude(const Grid& g, const std::vector<const Plane*>& comps) {
  Eigen::ArrayXXd mag = Eigen::ArrayXXd::Zero(g.N_xi, g.N_xi);
  for (const Plane* c : comps) {
    if (c->rows() != g.N_xi || c->cols() != g.N_xi)
      throw std::invalid_argument("weighted_lp_norm: plane does not match grid");
    mag += c->array().abs2();
  }
  return mag.sqrt();
}

double weighted_norm_of_magnitude(const Grid& g, const Eigen::ArrayXXd& mag,
                                  double p, double m) {
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp_norm: need p >= 1");
  Eigen::ArrayXXd weighted(g.N_xi, g.N_xi);
  for (int i2 = 0; i2 < g.N_xi; ++i2) {
    const double x2 = g.xi(i2);
    for (int i1 = 0; i1 < g.N_xi; ++i1) {
      const double x1 = g.xi(i1);
      weighted(i1, i2) =
          std::pow(1.0 + x1 * x1 + x2 * x2, 0.5 * m) * mag(i1, i2);
    }
  }
  if (p == kPInf) return weighted.maxCoeff();
  if (p == 2.0) return std::sqrt(g.cell_area() * weighted.square().sum());
  return std::pow(g.cell_area() * weighted.pow(p).sum(), 1.0 / p);
}

}  // namespace

double weighted_lp_norm(const Grid& g, const Plane& f, double p, double m) {
  return weighted_norm_of_magnitude(g, magnitude(g, {&f}), p, m);
}

double weighted_lp_norm(const Grid& g, const std::vector<const Plane*>& comps,
                        double p, double m) {
  return weighted_norm_of_magnitude(g, magnitude(g, comps), p, m);
}

double bz_norm(const SpectralField& f, double p, double m) {
  return bz_norm(std::vector<const SpectralField*>{&f}, p, m);
}

double bz_norm(const std::vector<const SpectralField*>& comps, double p, double m) {
  if (comps.empty()) return 0.0;
  const Grid& g = comps.front()->grid();
  double total = 0.0;
  for (int j = 0; j < g.ladder_size(); ++j) {
    std::vector<const Plane*> slices;
    slices.reserve(comps.size());
    for (const SpectralField* c : comps) slices.push_back(&c->slice(j));
    const double term = weighted_lp_norm(g, slices, p, m);
    total += (j == 0) ? term : 2.0 * term;  // conjugate slice at -zeta
  }
  return total;
}

}  // namespace oseenlab
