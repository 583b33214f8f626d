#include "dirtk/interpolate.hpp"

#include <stdexcept>

namespace dirtk {

namespace {

std::vector<Vec3> unit_vectors(const std::vector<SphericalPoint>& points) {
  std::vector<Vec3> u;
  u.reserve(points.size());
  for (const auto& p : points) u.push_back(unit_vector(p));
  return u;
}

// Bordered saddle system: Gram block K + lambda*I, constant-function border.
Matrix bordered_system(const std::vector<Vec3>& nodes, Real lambda) {
  const Index q = static_cast<Index>(nodes.size());
  Matrix a(q + 1, q + 1);
  for (Index i = 0; i < q; ++i) {
    a(i, i) = spline_kernel_order1(Real(0)) + lambda;
    for (Index j = i + 1; j < q; ++j)
      a(i, j) = a(j, i) =
          spline_kernel_order1(central_angle(nodes[static_cast<size_t>(i)],
                                             nodes[static_cast<size_t>(j)]));
    a(i, q) = a(q, i) = 1;
  }
  a(q, q) = 0;
  return a;
}

// Kernel expansion rows: one row per target, columns Q node kernels plus 1.
Matrix expansion_rows(const std::vector<SphericalPoint>& targets,
                      const std::vector<SphericalPoint>& nodes) {
  const auto t = unit_vectors(targets);
  const auto n = unit_vectors(nodes);
  Matrix e(static_cast<Index>(t.size()), static_cast<Index>(n.size()) + 1);
  for (size_t r = 0; r < t.size(); ++r) {
    for (size_t j = 0; j < n.size(); ++j)
      e(static_cast<Index>(r), static_cast<Index>(j)) =
          spline_kernel_order1(central_angle(t[r], n[j]));
    e(static_cast<Index>(r), static_cast<Index>(n.size())) = 1;
  }
  return e;
}

Eigen::ColPivHouseholderQR<Matrix> factor_system(const std::vector<SphericalPoint>& points,
                                                 Real lambda) {
  if (points.size() < 4) throw std::invalid_argument("spline fit needs at least 4 nodes");
  if (lambda < 0) throw std::invalid_argument("smoothing must be >= 0");
  Eigen::ColPivHouseholderQR<Matrix> qr(bordered_system(unit_vectors(points), lambda));
  if (qr.rank() < static_cast<Index>(points.size()) + 1)
    throw std::invalid_argument("singular spline system (duplicate nodes?)");
  return qr;
}

}  // namespace

SplineModel fit_spline(const Vector& values, const SphericalGrid& grid, Real smoothing) {
  if (values.size() != grid.size())
    throw std::invalid_argument("fit_spline needs one value per node");
  const auto qr = factor_system(grid.points, smoothing);
  Vector rhs(grid.size() + 1);
  rhs.head(grid.size()) = values;
  rhs(grid.size()) = 0;

  SplineModel model;
  model.node_positions = grid.points;
  model.coefficients = qr.solve(rhs);
  model.smoothing = smoothing;
  return model;
}

Vector evaluate_spline(const SplineModel& model, const SphericalGrid& targets) {
  if (model.coefficients.size() != static_cast<Index>(model.node_positions.size()) + 1)
    throw std::invalid_argument("model coefficients do not match its nodes");
  return expansion_rows(targets.points, model.node_positions) * model.coefficients;
}

InterpolatedDirectivity upsample(const BandDirectivity& d, const SphericalGrid& target,
                                 Real smoothing) {
  if (d.state != BalloonState::diffuse && d.state != BalloonState::calibrated)
    throw std::invalid_argument("upsample expects an equalized or calibrated balloon");
  if (d.pressures.rows() != d.grid.size())
    throw std::invalid_argument("balloon rows must match its grid");
  const Index q = d.grid.size();
  const Index bands = d.pressures.cols();

  // One factorization, all bands as right-hand sides.
  const auto qr = factor_system(d.grid.points, smoothing);
  Matrix rhs = Matrix::Zero(q + 1, bands);
  rhs.topRows(q) = d.pressures.cwiseAbs();
  const Matrix coeffs = qr.solve(rhs);

  InterpolatedDirectivity out;
  out.grid = target;
  out.source_state = d.state;
  out.pressures = expansion_rows(target.points, d.grid.points) * coeffs;
  out.clamped = (out.pressures.array() < 0).count();
  out.pressures = out.pressures.cwiseMax(Real(0));
  return out;
}

}  // namespace dirtk
