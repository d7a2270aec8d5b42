#pragma once

#include <optional>
#include <vector>

#include "geom/types.hpp"

namespace parkour::sim {

/// Piecewise-linear height profile h(x) along the terrain centerline (y = 0),
/// sampled uniformly. `ground_mask[i]` marks samples where any body contact
/// fails the episode (the ground between platforms). Heights are interpolated
/// between samples; mask lookups snap to the nearest sample.
struct TerrainProfile {
  double x0 = 0.0;
  double dx = 0.02;
  std::vector<double> samples;
  std::vector<bool> ground_mask;     // same length as samples
  std::vector<double> edge_markers;  // x-positions of platform boundaries
  double goal_x = 0.0;
  double end_min_x = 0.0;  // left edge of the end platform (success requires feet beyond it)

  int size() const { return static_cast<int>(samples.size()); }
  double x_min() const { return x0; }
  double x_max() const { return x0 + dx * (size() - 1); }

  /// Interpolated height; clamps to the boundary samples outside the range.
  double height(double x) const;

  /// Mask at the nearest sample (false outside the range).
  bool masked(double x) const;

  /// Height at the nearest sample (boundary samples outside the range).
  double sample_height(double x) const;

  void check() const;

  /// Uniform flat profile, unmasked, goal near the far end.
  static TerrainProfile flat(double x0, double length, double height, double dx = 0.02);
};

/// First intersection of a 2D ray with the profile polyline, as a distance
/// along `dir` (unit). Returns nullopt when the ray escapes the sampled range
/// without hitting.
std::optional<double> ray_profile(const TerrainProfile& profile, const Eigen::Vector2d& origin,
                                  const Eigen::Vector2d& dir);

/// Extracts the centerline profile of a z-up mesh by casting downward rays at
/// y = 0. Samples with no surface take `ground_z`. Samples at ground level
/// (within `mask_band`) are masked as failure terrain; `auto_edges` derives
/// edge markers from height discontinuities larger than `edge_jump`.
TerrainProfile profile_from_mesh(const geom::TriMesh& mesh, double ground_z, double goal_x,
                                 double end_min_x, double dx = 0.02, double mask_band = 0.05,
                                 bool auto_edges = true, double edge_jump = 0.1);

}  // namespace parkour::sim
