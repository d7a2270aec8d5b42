#include "geom/heightfield.hpp"

namespace parkour::geom {

TriMesh mesh_heightfield(const HeightField& hf, double ground_z, bool skirts) {
  if (hf.nx < 2 || hf.ny < 2) throw std::invalid_argument("heightfield: need at least 2x2 nodes");
  if (hf.cell <= 0) throw std::invalid_argument("heightfield: cell must be positive");

  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(hf.nx) * hf.ny + (skirts ? 2 * (hf.nx + hf.ny) : 0));
  for (int iy = 0; iy < hf.ny; ++iy)
    for (int ix = 0; ix < hf.nx; ++ix)
      mesh.vertices.push_back(Vec3(hf.node_x(ix), hf.node_y(iy), hf.at(ix, iy)));

  auto vid = [&](int ix, int iy) { return static_cast<std::int32_t>(iy * hf.nx + ix); };
  for (int iy = 0; iy + 1 < hf.ny; ++iy) {
    for (int ix = 0; ix + 1 < hf.nx; ++ix) {
      const auto v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
      const auto v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  if (!skirts) return mesh;

  // drop vertical walls from the perimeter to ground_z (degenerate wall quads
  // where the rim already sits at ground level are skipped)
  auto add_skirt = [&](std::int32_t top_a, std::int32_t top_b) {
    const Vec3& a = mesh.vertices[top_a];
    const Vec3& b = mesh.vertices[top_b];
    if (std::abs(a.z() - ground_z) < 1e-12 && std::abs(b.z() - ground_z) < 1e-12) return;
    const auto base = static_cast<std::int32_t>(mesh.vertices.size());
    mesh.vertices.push_back(Vec3(a.x(), a.y(), ground_z));
    mesh.vertices.push_back(Vec3(b.x(), b.y(), ground_z));
    if (std::abs(a.z() - ground_z) >= 1e-12) mesh.triangles.push_back({top_a, base, top_b});
    if (std::abs(b.z() - ground_z) >= 1e-12) mesh.triangles.push_back({top_b, base, base + 1});
  };
  for (int ix = 0; ix + 1 < hf.nx; ++ix) {
    add_skirt(vid(ix, 0), vid(ix + 1, 0));
    add_skirt(vid(ix + 1, hf.ny - 1), vid(ix, hf.ny - 1));
  }
  for (int iy = 0; iy + 1 < hf.ny; ++iy) {
    add_skirt(vid(hf.nx - 1, iy), vid(hf.nx - 1, iy + 1));
    add_skirt(vid(0, iy + 1), vid(0, iy));
  }
  return mesh;
}

}  // namespace parkour::geom
