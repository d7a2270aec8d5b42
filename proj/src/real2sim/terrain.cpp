#include "real2sim/terrain.hpp"

#include <cmath>

#include "geom/mesh_query.hpp"

namespace parkour::real2sim {

namespace {

constexpr double kAnchorTol = 1e-6;
constexpr double kGroundTol = 1e-6;
// |end.y| / ‖end − start‖ bound: sin(0.5°)
const double kYawTol = std::sin(0.5 * M_PI / 180.0);

runio::Json vec3_json(const geom::Vec3& v) {
  runio::Json a = runio::Json::array();
  a.push_back(v.x());
  a.push_back(v.y());
  a.push_back(v.z());
  return a;
}

geom::Vec3 vec3_from(const runio::Json& a) {
  return {a.at(std::size_t{0}).as_number(), a.at(std::size_t{1}).as_number(),
          a.at(std::size_t{2}).as_number()};
}

}  // namespace

ValidationReport validate_sim_ready(const SimReadyTerrain& t) {
  ValidationReport rep;
  for (const auto& v : t.mesh.vertices) {
    if (!v.allFinite()) {
      rep.violations.push_back("nan-vertex");
      return rep;  // downstream checks would just cascade
    }
  }
  if (geom::count_degenerate_triangles(t.mesh) > 0)
    rep.violations.push_back("degenerate-triangle");
  if (std::abs(t.ground_height) > kGroundTol) rep.violations.push_back("ground-not-zero");
  if (std::abs(t.start_centroid.x()) > kAnchorTol || std::abs(t.start_centroid.y()) > kAnchorTol)
    rep.violations.push_back("start-not-origin");
  const double span = (t.end_centroid - t.start_centroid).norm();
  if (t.end_centroid.x() <= 0.0 || span <= 0.0 ||
      std::abs(t.end_centroid.y()) > kYawTol * span)
    rep.violations.push_back("end-not-on-x");

  // sampled downward rays must never find surface below the ground plane
  if (!t.mesh.vertices.empty()) {
    const double z_top = t.bounds_hi.z() + 1.0;
    const int n = 8;
    for (int iy = 0; iy <= n; ++iy) {
      for (int ix = 0; ix <= n; ++ix) {
        const double x =
            t.bounds_lo.x() + (t.bounds_hi.x() - t.bounds_lo.x()) * ix / n;
        const double y =
            t.bounds_lo.y() + (t.bounds_hi.y() - t.bounds_lo.y()) * iy / n;
        const auto hit = geom::ray_mesh(t.mesh, {x, y, z_top}, {0, 0, -1});
        if (hit && z_top - *hit < t.ground_height - 1e-6) {
          rep.violations.push_back("surface-below-ground");
          return rep;
        }
      }
    }
  }
  return rep;
}

runio::Json terrain_meta_json(const SimReadyTerrain& t) {
  runio::Json j = runio::Json::object();
  j["start_centroid"] = vec3_json(t.start_centroid);
  j["end_centroid"] = vec3_json(t.end_centroid);
  j["ground_height"] = runio::Json(t.ground_height);
  j["bounds_lo"] = vec3_json(t.bounds_lo);
  j["bounds_hi"] = vec3_json(t.bounds_hi);
  return j;
}

SimReadyTerrain terrain_from_meta_json(const runio::Json& meta) {
  SimReadyTerrain t;
  t.start_centroid = vec3_from(meta.at("start_centroid"));
  t.end_centroid = vec3_from(meta.at("end_centroid"));
  t.ground_height = meta.at("ground_height").as_number();
  t.bounds_lo = vec3_from(meta.at("bounds_lo"));
  t.bounds_hi = vec3_from(meta.at("bounds_hi"));
  return t;
}

}  // namespace parkour::real2sim
