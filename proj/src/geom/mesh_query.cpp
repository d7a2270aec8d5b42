#include "geom/mesh_query.hpp"

#include <limits>

namespace parkour::geom {

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c) {
  constexpr double kEps = 1e-12;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < kEps) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv_det;
  if (u < -kEps || u > 1.0 + kEps) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv_det;
  if (v < -kEps || u + v > 1.0 + kEps) return std::nullopt;
  const double t = e2.dot(q) * inv_det;
  if (t < 0.0) return std::nullopt;
  return t;
}

std::optional<double> ray_mesh(const TriMesh& mesh, const Vec3& origin, const Vec3& dir) {
  double best = std::numeric_limits<double>::infinity();
  bool hit = false;
  for (const auto& tri : mesh.triangles) {
    const auto t = ray_triangle(origin, dir, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                mesh.vertices[tri[2]]);
    if (t && *t < best) {
      best = *t;
      hit = true;
    }
  }
  if (!hit) return std::nullopt;
  return best;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

int count_degenerate_triangles(const TriMesh& mesh, double min_area) {
  int n = 0;
  for (const auto& tri : mesh.triangles)
    if (triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) <
        min_area)
      ++n;
  return n;
}

MeshBounds mesh_bounds(const TriMesh& mesh) {
  if (mesh.vertices.empty()) throw std::invalid_argument("mesh_bounds: empty mesh");
  MeshBounds b{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

}  // namespace parkour::geom
