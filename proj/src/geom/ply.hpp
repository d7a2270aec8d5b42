#pragma once

#include <string>

#include "geom/types.hpp"

namespace parkour::geom {

/// PLY with float32 x,y,z, optional uchar `label` per vertex, optional faces.
/// ASCII and binary_little_endian are both read; `binary` selects the written format.
void write_ply(const std::string& path, const PointCloud& cloud, bool binary = true);
void write_ply(const std::string& path, const TriMesh& mesh, bool binary = true);

PointCloud read_ply_cloud(const std::string& path);
TriMesh read_ply_mesh(const std::string& path);

}  // namespace parkour::geom
