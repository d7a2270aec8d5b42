#pragma once

#include <string>
#include <vector>

#include "geom/types.hpp"
#include "runio/json.hpp"

namespace parkour::real2sim {

/// Canonical simulation frame: z-up, ground plane at z = 0, traversal along
/// +x, start-platform centroid anchored at the xy-origin (its z is the
/// platform top height).
struct SimReadyTerrain {
  geom::TriMesh mesh;
  geom::Vec3 start_centroid = geom::Vec3::Zero();
  geom::Vec3 end_centroid = geom::Vec3::Zero();
  double ground_height = 0.0;
  geom::Vec3 bounds_lo = geom::Vec3::Zero();
  geom::Vec3 bounds_hi = geom::Vec3::Zero();
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the canonical-frame contract: finite vertices, no degenerate
/// triangles, ground at z = 0, start anchored at the xy-origin, end on +x,
/// and no surface below ground along sampled downward rays.
ValidationReport validate_sim_ready(const SimReadyTerrain& t);

/// Metadata block shared by reconstructed and procedural terrains (the mesh
/// itself travels separately as OBJ).
runio::Json terrain_meta_json(const SimReadyTerrain& t);
SimReadyTerrain terrain_from_meta_json(const runio::Json& meta);  // mesh left empty

}  // namespace parkour::real2sim
