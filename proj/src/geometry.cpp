#include "dirtk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace dirtk {

SphericalPoint make_point(Real azimuth_deg, Real colatitude_deg, Real radius_m) {
  if (!(radius_m > 0)) throw std::invalid_argument("point radius must be > 0");
  if (colatitude_deg < 0 || colatitude_deg > 180)
    throw std::invalid_argument("colatitude must lie in [0, 180] degrees");
  Real az = std::fmod(azimuth_deg, Real(360));
  if (az < 0) az += 360;
  if (az == 360) az = 0;  // fmod can round up for tiny negatives
  if (colatitude_deg == 0 || colatitude_deg == 180) az = 0;
  return SphericalPoint{az, colatitude_deg, radius_m};
}

bool same_direction(const SphericalPoint& a, const SphericalPoint& b, Real tol_deg) {
  return central_angle(a, b) <= deg2rad(tol_deg);
}

Vec3 unit_vector(const SphericalPoint& p) {
  const Real az = deg2rad(p.azimuth);
  const Real col = deg2rad(p.colatitude);
  return Vec3(std::sin(col) * std::cos(az), std::sin(col) * std::sin(az), std::cos(col));
}

SphericalPoint from_unit_vector(const Vec3& u, Real radius_m) {
  const Vec3 n = u.normalized();
  const Real col = rad2deg(std::acos(std::clamp(n.z(), Real(-1), Real(1))));
  Real az = rad2deg(std::atan2(n.y(), n.x()));
  if (az < 0) az += 360;
  return make_point(az, col, radius_m);
}

Real central_angle(const SphericalPoint& a, const SphericalPoint& b) {
  return central_angle(unit_vector(a), unit_vector(b));
}

SphericalGrid make_equiangular_grid(Real step_deg) {
  const Real ratio = 180 / step_deg;
  if (!(step_deg > 0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw std::invalid_argument(
        "grid step must divide 180 and 360 evenly; valid steps: 1, 2, 3, 4, 5, 6, 9, "
        "10, 12, 15, 18, 20, 30, 36, 45, 60, 90, 180");
  }
  const int n_col = static_cast<int>(std::round(ratio));      // bands between poles
  const int n_az = static_cast<int>(std::round(360 / step_deg));
  const Real half = deg2rad(step_deg) / 2;

  SphericalGrid grid;
  grid.points.reserve(static_cast<size_t>(n_col - 1) * n_az + 2);
  std::vector<Real> w;
  w.reserve(grid.points.capacity());

  grid.points.push_back(make_point(0, 0));
  w.push_back((1 - std::cos(half)) / 2);
  for (int i = 1; i < n_col; ++i) {
    const Real col = i * step_deg;
    const Real band = (std::cos(deg2rad(col) - half) - std::cos(deg2rad(col) + half)) / 2;
    for (int j = 0; j < n_az; ++j) {
      grid.points.push_back(make_point(j * step_deg, col));
      w.push_back(band / n_az);
    }
  }
  grid.points.push_back(make_point(0, 180));
  w.push_back((1 - std::cos(half)) / 2);

  grid.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
  return grid;
}

namespace {

// Incremental 3D convex hull, specialised for unit directions (every input
// point is extreme). Faces keep outward orientation; for cospherical points
// the hull triangulation is a Delaunay triangulation of the sphere, whose
// dual (facet circumcenters) gives the Voronoi diagram.
struct Hull {
  struct Face {
    int a, b, c;
    Vec3 n;  // outward normal, unnormalized
    bool alive = true;
  };

  std::vector<Vec3> pts;
  std::vector<Face> faces;
  Vec3 inside = Vec3::Zero();  // strictly interior reference point

  static Vec3 normal(const Vec3& a, const Vec3& b, const Vec3& c) {
    return (b - a).cross(c - a);
  }

  void add_face(int a, int b, int c) {
    Vec3 n = normal(pts[a], pts[b], pts[c]);
    if (n.dot(pts[a] - inside) < 0) {
      std::swap(b, c);
      n = -n;
    }
    faces.push_back(Face{a, b, c, n});
  }

  explicit Hull(const std::vector<Vec3>& input) : pts(input) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw std::invalid_argument("area weights need at least 4 points");

    // Seed tetrahedron from spread-out non-degenerate points.
    int i1 = 1;
    while (i1 < n && (pts[i1] - pts[0]).norm() < 1e-12) ++i1;
    if (i1 == n) throw std::invalid_argument("degenerate point set (all coincident)");
    int i2 = -1;
    Real best = 1e-12;
    for (int i = i1 + 1; i < n; ++i) {
      const Real a = normal(pts[0], pts[i1], pts[i]).norm();
      if (a > best) { best = a; i2 = i; }
    }
    if (i2 < 0) throw std::invalid_argument("degenerate point set (all collinear)");
    int i3 = -1;
    best = 1e-10;
    const Vec3 n0 = normal(pts[0], pts[i1], pts[i2]).normalized();
    for (int i = 1; i < n; ++i) {
      const Real d = std::abs(n0.dot(pts[i] - pts[0]));
      if (d > best) { best = d; i3 = i; }
    }
    if (i3 < 0)
      throw std::invalid_argument("degenerate point set (coplanar, e.g. one great circle)");

    inside = (pts[0] + pts[i1] + pts[i2] + pts[i3]) / 4;
    add_face(0, i1, i2);
    add_face(0, i1, i3);
    add_face(0, i2, i3);
    add_face(i1, i2, i3);

    std::vector<bool> used(n, false);
    used[0] = used[i1] = used[i2] = used[i3] = true;
    for (int p = 0; p < n; ++p) {
      if (!used[p]) insert(p);
    }
  }

  void insert(int p) {
    // Horizon edges: directed edges of visible faces whose twin is hidden.
    std::map<std::pair<int, int>, int> edge_count;
    bool any_visible = false;
    for (auto& f : faces) {
      if (!f.alive) continue;
      if (f.n.dot(pts[p] - pts[f.a]) > 1e-12) {
        any_visible = true;
        f.alive = false;
        for (auto [u, v] : {std::pair{f.a, f.b}, std::pair{f.b, f.c}, std::pair{f.c, f.a}}) {
          auto key = std::minmax(u, v);
          edge_count[{key.first, key.second}]++;
        }
      }
    }
    if (!any_visible) return;  // numerically interior: duplicate direction

    std::vector<Face> kept;
    kept.reserve(faces.size());
    for (auto& f : faces)
      if (f.alive) kept.push_back(f);

    // Horizon edges are edges of kept faces whose twin was just deleted;
    // each spawns one new face to p.
    const size_t n_kept = kept.size();
    for (size_t k = 0; k < n_kept; ++k) {
      const Face f = kept[k];
      for (auto [u, v] : {std::pair{f.a, f.b}, std::pair{f.b, f.c}, std::pair{f.c, f.a}}) {
        auto key = std::minmax(u, v);
        auto it = edge_count.find({key.first, key.second});
        if (it != edge_count.end() && it->second == 1) {
          Vec3 n = normal(pts[u], pts[v], pts[p]);
          if (n.dot(pts[u] - inside) < 0) {
            std::swap(u, v);
            n = -n;
          }
          kept.push_back(Face{u, v, p, n});
        }
      }
    }
    faces = std::move(kept);
  }
};

Real spherical_triangle_excess(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Real sa = central_angle(b, c);
  const Real sb = central_angle(c, a);
  const Real sc = central_angle(a, b);
  const Real s = (sa + sb + sc) / 2;
  const Real t = std::tan(s / 2) * std::tan((s - sa) / 2) * std::tan((s - sb) / 2) *
                 std::tan((s - sc) / 2);
  return 4 * std::atan(std::sqrt(std::max(t, Real(0))));
}

}  // namespace

Vector area_weights(const std::vector<SphericalPoint>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw std::invalid_argument("area weights need at least 4 points");
  std::vector<Vec3> dirs(n);
  for (int i = 0; i < n; ++i) dirs[i] = unit_vector(points[i]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((dirs[i] - dirs[j]).norm() < 1e-9)
        throw std::invalid_argument("duplicate directions have no Voronoi area");

  Hull hull(dirs);

  // Collect per-vertex circumcenters of incident faces; for unit input the
  // circumcenter of a facet is its normalized outward normal.
  std::vector<std::vector<Vec3>> cell(n);
  for (const auto& f : hull.faces) {
    const Vec3 c = f.n.normalized();
    cell[f.a].push_back(c);
    cell[f.b].push_back(c);
    cell[f.c].push_back(c);
  }

  Vector w(n);
  for (int i = 0; i < n; ++i) {
    auto& ring = cell[i];
    if (ring.size() < 3)
      throw std::runtime_error("degenerate Voronoi cell (hull construction failed)");
    // Order the circumcenters around the node in its tangent plane.
    const Vec3 v = dirs[i];
    const Vec3 t1 = (std::abs(v.z()) < Real(0.9) ? Vec3(0, 0, 1) : Vec3(1, 0, 0))
                        .cross(v)
                        .normalized();
    const Vec3 t2 = v.cross(t1);
    std::sort(ring.begin(), ring.end(), [&](const Vec3& a, const Vec3& b) {
      return std::atan2(a.dot(t2), a.dot(t1)) < std::atan2(b.dot(t2), b.dot(t1));
    });
    Real area = 0;
    for (size_t k = 1; k + 1 < ring.size(); ++k)
      area += spherical_triangle_excess(ring[0], ring[k], ring[k + 1]);
    w(i) = area;
  }

  const Real total = w.sum();
  if (!(total > 0) || std::abs(total - 4 * kPi) > 1e-6 * 4 * kPi)
    throw std::runtime_error("Voronoi areas do not tile the sphere (degenerate input)");
  return w / total;
}

SphericalGrid pentakis_dodecahedron(Real radius_m) {
  const Real phi = (1 + std::sqrt(Real(5))) / 2;
  std::vector<Vec3> verts;
  verts.reserve(32);
  // 12 icosahedron vertices: cyclic permutations of (0, +-1, +-phi).
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      verts.emplace_back(0, s1 * 1, s2 * phi);
      verts.emplace_back(s1 * 1, s2 * phi, 0);
      verts.emplace_back(s2 * phi, 0, s1 * 1);
    }
  }
  // 20 dodecahedron vertices: (+-1, +-1, +-1) and cyclic (0, +-1/phi, +-phi).
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) verts.emplace_back(s1 * 1, s2 * 1, s3 * 1);
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      verts.emplace_back(0, s1 / phi, s2 * phi);
      verts.emplace_back(s1 / phi, s2 * phi, 0);
      verts.emplace_back(s2 * phi, 0, s1 / phi);
    }
  }

  SphericalGrid grid;
  grid.points.reserve(verts.size());
  for (const auto& v : verts) grid.points.push_back(from_unit_vector(v, radius_m));
  grid.weights = area_weights(grid.points);
  return grid;
}

void write_grid_table(const SphericalGrid& grid, std::ostream& os) {
  os << "# azimuth_deg colatitude_deg radius_m weight\n";
  os.precision(17);
  for (Index i = 0; i < grid.size(); ++i) {
    const auto& p = grid.points[static_cast<size_t>(i)];
    os << p.azimuth << ' ' << p.colatitude << ' ' << p.radius << ' ' << grid.weights(i)
       << '\n';
  }
}

SphericalGrid read_grid_table(std::istream& is) {
  SphericalGrid grid;
  std::vector<Real> w;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Real az, col, r, wi;
    if (!(ls >> az)) continue;  // blank or comment-only line
    if (!(ls >> col >> r >> wi))
      throw std::runtime_error("grid table line " + std::to_string(lineno) +
                               ": expected 'azimuth colatitude radius weight'");
    grid.points.push_back(make_point(az, col, r));
    w.push_back(wi);
  }
  if (w.empty()) throw std::runtime_error("grid table contains no points");
  grid.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
  if (std::abs(grid.weights.sum() - 1) > 1e-9)
    throw std::runtime_error("grid table weights do not sum to 1");
  return grid;
}

}  // namespace dirtk
