#pragma once

// Weighted Lebesgue norms on the xi-plane and the axial Wiener-algebra
// composition over the retained ladder.
//
//   weighted_lp_norm:  || <xi>^m f ||_{L^p} by box quadrature (p = inf: sup).
//   bz_norm:           sum over the full ladder (counting measure, both
//                      signs) of the per-mode xi-plane norms.

#include <limits>
#include <vector>

#include "oseenlab/spectral_field.hpp"

namespace oseenlab {

inline constexpr double kPInf = std::numeric_limits<double>::infinity();

// Norm of a scalar xi-plane (physical samples). p >= 1 or kPInf.
double weighted_lp_norm(const Grid& g, const Plane& f, double p, double m);

// Norm of a vector xi-plane: pointwise Euclidean magnitude across components.
double weighted_lp_norm(const Grid& g, const std::vector<const Plane*>& comps,
                        double p, double m);

// Exact match for braced component lists ({&f1, &f2} would otherwise also
// court Plane's own initializer-list constructor).
inline double weighted_lp_norm(const Grid& g,
                               std::initializer_list<const Plane*> comps,
                               double p, double m) {
  return weighted_lp_norm(g, std::vector<const Plane*>(comps), p, m);
}

// Wiener-algebra norm of a scalar slab field.
double bz_norm(const SpectralField& f, double p, double m);

// Wiener-algebra norm of a vector slab field (Euclidean across components
// within each ladder slice).
double bz_norm(const std::vector<const SpectralField*>& comps, double p, double m);

// Convenience: bz norm with the grid's own weight exponent.
inline double bz_norm(const SpectralField& f, double p) {
  return bz_norm(f, p, f.grid().weight_m);
}

}  // namespace oseenlab
