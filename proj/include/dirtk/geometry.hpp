#pragma once

#include "dirtk/types.hpp"

#include <cmath>
#include <iosfwd>
#include <vector>

namespace dirtk {

// Direction + distance in the measurement coordinate convention:
// azimuth 0 degrees points along +x (the direction the musician faces),
// 90 degrees along +y; colatitude 0 degrees is the +z pole, 90 degrees
// the horizontal plane.
struct SphericalPoint {
  Real azimuth = 0;     // degrees, [0, 360)
  Real colatitude = 0;  // degrees, [0, 180]
  Real radius = 1;      // metres, > 0
};

// Wraps azimuth into [0, 360) and forces the canonical azimuth 0 at the
// poles so equality tests are well defined.
SphericalPoint make_point(Real azimuth_deg, Real colatitude_deg, Real radius_m = 1);

bool same_direction(const SphericalPoint& a, const SphericalPoint& b, Real tol_deg = 1e-9);

Vec3 unit_vector(const SphericalPoint& p);
SphericalPoint from_unit_vector(const Vec3& u, Real radius_m = 1);

// Great-circle angle in radians, [0, pi]. The atan2 form stays accurate
// for nearly parallel and nearly antipodal directions.
template <class DerivedA, class DerivedB>
typename DerivedA::Scalar central_angle(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  using S = typename DerivedA::Scalar;
  Eigen::Matrix<S, 3, 1> ua = a.normalized();
  Eigen::Matrix<S, 3, 1> ub = b.normalized();
  return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

Real central_angle(const SphericalPoint& a, const SphericalPoint& b);

// Point set plus normalized area weights (fractions of the full sphere).
struct SphericalGrid {
  std::vector<SphericalPoint> points;
  Vector weights;

  Index size() const { return static_cast<Index>(points.size()); }
};

// Equiangular grid with the given step in azimuth and colatitude; the two
// poles are stored once each. Weights are closed-form ring/cap areas.
// step_deg must divide 180 (and hence 360) evenly.
SphericalGrid make_equiangular_grid(Real step_deg);

// Normalized spherical Voronoi cell areas for an arbitrary direction set
// (computed via convex-hull duality). Throws on fewer than 4 points,
// coplanar/degenerate configurations, and duplicate directions.
Vector area_weights(const std::vector<SphericalPoint>& points);

// The 32-channel measurement layout: vertices of a pentakis dodecahedron
// (12 icosahedron + 20 dodecahedron vertices) with Voronoi area weights.
// Default radius per the 2.1 m array diameter.
SphericalGrid pentakis_dodecahedron(Real radius_m = 1.05);

// Plain-text table (azimuth colatitude radius weight per line, '#' for
// comments) for debugging and test fixtures.
void write_grid_table(const SphericalGrid& grid, std::ostream& os);
SphericalGrid read_grid_table(std::istream& is);

}  // namespace dirtk
