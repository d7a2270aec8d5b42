#pragma once

#include <optional>

#include "geom/types.hpp"

namespace parkour::geom {

// Möller–Trumbore. Returns distance t >= 0 along `dir` (unit not required),
// or nullopt when the ray misses or the triangle is degenerate.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c);

// Nearest hit over all triangles; nullopt when nothing is hit.
std::optional<double> ray_mesh(const TriMesh& mesh, const Vec3& origin, const Vec3& dir);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

// Number of triangles with area below `min_area`.
int count_degenerate_triangles(const TriMesh& mesh, double min_area = 1e-12);

struct MeshBounds {
  Vec3 lo;
  Vec3 hi;
};

MeshBounds mesh_bounds(const TriMesh& mesh);

}  // namespace parkour::geom
