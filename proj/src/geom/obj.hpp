#pragma once

#include <string>

#include "geom/types.hpp"

namespace parkour::geom {

/// Plain v/f OBJ records, 1-based indices.
void write_obj(const std::string& path, const TriMesh& mesh);
TriMesh read_obj(const std::string& path);

}  // namespace parkour::geom
