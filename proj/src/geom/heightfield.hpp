#pragma once

#include "geom/types.hpp"

namespace parkour::geom {

/// Regular node grid of heights over the xy-plane. Node (ix, iy) sits at
/// (x0 + ix·cell, y0 + iy·cell).
struct HeightField {
  double x0 = 0, y0 = 0;
  double cell = 0.02;
  int nx = 0, ny = 0;
  std::vector<double> z;  // nx*ny, x-major: index = iy*nx + ix

  double& at(int ix, int iy) { return z[static_cast<std::size_t>(iy) * nx + ix]; }
  double at(int ix, int iy) const { return z[static_cast<std::size_t>(iy) * nx + ix]; }
  double node_x(int ix) const { return x0 + ix * cell; }
  double node_y(int iy) const { return y0 + iy * cell; }

  static HeightField filled(double x0, double y0, double cell, int nx, int ny, double value) {
    HeightField hf;
    hf.x0 = x0;
    hf.y0 = y0;
    hf.cell = cell;
    hf.nx = nx;
    hf.ny = ny;
    hf.z.assign(static_cast<std::size_t>(nx) * ny, value);
    return hf;
  }
};

/// Triangulates the node grid: 2(nx−1)(ny−1) top-surface triangles, winding up.
/// With `skirts`, perimeter nodes are extruded down to `ground_z` so nothing can
/// pass under the surface from the sides.
TriMesh mesh_heightfield(const HeightField& hf, double ground_z, bool skirts = true);

}  // namespace parkour::geom
