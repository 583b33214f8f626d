#pragma once

#include <cmath>
#include <vector>

#include "dirtk/directivity.hpp"
#include "dirtk/geometry.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

// Reproducing kernel of the order-1 spherical thin-plate pseudo-spline
// (Legendre series with eigenvalues 1/((n+1)(n+2))), in closed form:
//   K(g) = 2 u^2 ln((1+u)/u) - 2u + 1/2,  u = sin(g/2),  K(0) = 1/2.
template <class S>
S spline_kernel_order1(S gamma) {
  const S u = std::sin(gamma / 2);
  if (u < S(1e-14)) return S(0.5);
  return 2 * u * u * std::log((1 + u) / u) - 2 * u + S(0.5);
}

// Kernel weights plus a constant term, tied to the nodes they were fitted on.
struct SplineModel {
  std::vector<SphericalPoint> node_positions;  // Q nodes
  Vector coefficients;                         // Q kernel weights, then the constant
  Real smoothing = 0;                          // lambda >= 0
  int order = 1;
};

// Solves the bordered (Q+1) x (Q+1) system (kernel Gram matrix with the
// diagonal inflated by lambda, plus the constant-function row forcing the
// kernel weights to sum to zero). lambda = 0 interpolates the values exactly
// at the nodes.
SplineModel fit_spline(const Vector& values, const SphericalGrid& grid, Real smoothing = 0);

// Kernel expansion at each target point.
Vector evaluate_spline(const SplineModel& model, const SphericalGrid& targets);

// Per-band fit on the measurement grid and evaluation on the target grid.
// The fits share one factorization. Negative evaluations (spline overshoot)
// are clamped to zero and counted on the result.
InterpolatedDirectivity upsample(const BandDirectivity& d, const SphericalGrid& target,
                                 Real smoothing = 0);

}  // namespace dirtk
