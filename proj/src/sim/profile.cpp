#include "sim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geom/mesh_query.hpp"

namespace parkour::sim {

double TerrainProfile::height(double x) const {
  if (samples.empty()) throw std::logic_error("profile: empty");
  const double f = (x - x0) / dx;
  if (f <= 0.0) return samples.front();
  if (f >= size() - 1) return samples.back();
  const int i = static_cast<int>(f);
  const double a = f - i;
  return samples[i] * (1.0 - a) + samples[i + 1] * a;
}

bool TerrainProfile::masked(double x) const {
  if (ground_mask.empty()) return false;
  const int i = static_cast<int>(std::lround((x - x0) / dx));
  if (i < 0 || i >= size()) return false;
  return ground_mask[static_cast<std::size_t>(i)];
}

double TerrainProfile::sample_height(double x) const {
  const int i = std::clamp(static_cast<int>(std::lround((x - x0) / dx)), 0, size() - 1);
  return samples[static_cast<std::size_t>(i)];
}

void TerrainProfile::check() const {
  if (samples.size() < 2) throw std::invalid_argument("profile: need at least 2 samples");
  if (dx <= 0) throw std::invalid_argument("profile: dx must be positive");
  if (!ground_mask.empty() && ground_mask.size() != samples.size())
    throw std::invalid_argument("profile: mask length mismatch");
  for (double s : samples)
    if (!std::isfinite(s)) throw std::invalid_argument("profile: non-finite sample");
  if (goal_x < x_min() || goal_x > x_max())
    throw std::invalid_argument("profile: goal outside sampled range");
}

TerrainProfile TerrainProfile::flat(double x0, double length, double height, double dx) {
  TerrainProfile p;
  p.x0 = x0;
  p.dx = dx;
  const int n = static_cast<int>(std::ceil(length / dx)) + 1;
  p.samples.assign(n, height);
  p.ground_mask.assign(n, false);
  p.goal_x = x0 + length - 0.5;
  p.end_min_x = p.goal_x - 0.45;
  return p;
}

std::optional<double> ray_profile(const TerrainProfile& profile, const Eigen::Vector2d& origin,
                                  const Eigen::Vector2d& dir) {
  const int n = profile.size();
  if (n < 2) return std::nullopt;

  // Vertical ray: single column lookup.
  if (std::abs(dir.x()) < 1e-15) {
    if (dir.y() >= 0) return std::nullopt;
    if (origin.x() < profile.x_min() || origin.x() > profile.x_max()) return std::nullopt;
    const double h = profile.height(origin.x());
    if (origin.y() < h) return std::nullopt;
    return (origin.y() - h) / -dir.y();
  }

  // March segments in the ray's x direction: t grows monotonically with x, so
  // the first segment intersection found is the nearest.
  const int step = dir.x() > 0 ? 1 : -1;
  double fi = (origin.x() - profile.x0) / profile.dx;
  int i = step > 0 ? static_cast<int>(std::floor(fi)) : static_cast<int>(std::ceil(fi)) - 1;
  i = std::clamp(i, 0, n - 2);
  // If the origin starts outside the range moving away, nothing to hit.
  if (step > 0 && fi >= n - 1) return std::nullopt;
  if (step < 0 && fi <= 0) return std::nullopt;

  for (; i >= 0 && i < n - 1; i += step) {
    const double xa = profile.x0 + i * profile.dx;
    const Eigen::Vector2d a(xa, profile.samples[i]);
    const Eigen::Vector2d b(xa + profile.dx, profile.samples[i + 1]);
    // Solve origin + t·dir = a + s·(b−a), t ≥ 0, s ∈ [0,1].
    const Eigen::Vector2d e = b - a;
    const double det = dir.x() * (-e.y()) - dir.y() * (-e.x());
    if (std::abs(det) < 1e-15) continue;
    const Eigen::Vector2d rhs = a - origin;
    const double t = (rhs.x() * (-e.y()) - rhs.y() * (-e.x())) / det;
    const double s = (dir.x() * rhs.y() - dir.y() * rhs.x()) / det;
    if (t >= 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) return t;
  }
  return std::nullopt;
}

TerrainProfile profile_from_mesh(const geom::TriMesh& mesh, double ground_z, double goal_x,
                                 double end_min_x, double dx, double mask_band, bool auto_edges,
                                 double edge_jump) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw std::invalid_argument("profile_from_mesh: empty mesh");
  const geom::MeshBounds b = geom::mesh_bounds(mesh);

  // Only triangles whose y-range spans the centerline can be hit.
  geom::TriMesh strip;
  strip.vertices = mesh.vertices;
  for (const auto& tri : mesh.triangles) {
    double ylo = mesh.vertices[tri[0]].y(), yhi = ylo;
    for (int k = 1; k < 3; ++k) {
      ylo = std::min(ylo, mesh.vertices[tri[k]].y());
      yhi = std::max(yhi, mesh.vertices[tri[k]].y());
    }
    if (ylo <= 1e-9 && yhi >= -1e-9) strip.triangles.push_back(tri);
  }

  TerrainProfile p;
  p.dx = dx;
  p.x0 = b.lo.x();
  const int n = static_cast<int>(std::floor((b.hi.x() - b.lo.x()) / dx)) + 1;
  if (n < 2) throw std::invalid_argument("profile_from_mesh: mesh extent smaller than one cell");
  p.samples.resize(n);
  p.ground_mask.resize(n);
  const double z_top = b.hi.z() + 1.0;
  for (int i = 0; i < n; ++i) {
    const double x = p.x0 + i * dx;
    const auto t = geom::ray_mesh(strip, geom::Vec3(x, 0.0, z_top), geom::Vec3(0, 0, -1));
    p.samples[i] = t ? z_top - *t : ground_z;
    p.ground_mask[i] = p.samples[i] <= ground_z + mask_band;
  }
  if (auto_edges) {
    for (int i = 0; i + 1 < n; ++i)
      if (std::abs(p.samples[i + 1] - p.samples[i]) > edge_jump)
        p.edge_markers.push_back(p.x0 + (i + 0.5) * dx);
  }
  p.goal_x = goal_x;
  p.end_min_x = end_min_x;
  p.check();
  return p;
}

}  // namespace parkour::sim
