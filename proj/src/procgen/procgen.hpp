#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "real2sim/terrain.hpp"
#include "sim/profile.hpp"
#include "sim/termination.hpp"

namespace parkour::procgen {

enum class TerrainFamily { Wedges, Stakes, Boxes, Trapezoids, NarrowBeams, Mixed };

const char* family_name(TerrainFamily f);
TerrainFamily family_from_name(const std::string& name);

/// Difficulty endpoints, lerped by difficulty in [0, 1]. Config-overridable.
struct DifficultyTable {
  double gap_min = 0.10, gap_max = 0.45;          // inter-obstacle gap
  double box_len_max = 0.80, box_len_min = 0.35;  // box length along x
  double beam_width_max = 0.40, beam_width_min = 0.12;
  double stake_top_max = 0.35, stake_top_min = 0.15;  // square stake side
  double wedge_slope_min_deg = 10.0, wedge_slope_max_deg = 30.0;
  double trap_top_max = 0.60, trap_top_min = 0.25;  // trapezoid plateau length
};

struct TerrainParams {
  TerrainFamily family = TerrainFamily::Boxes;
  double difficulty = 0.0;  // clamped to [0, 1]
  std::uint64_t seed = 0;
  int n_obstacles = 6;
  double platform_len = 0.9, platform_width = 0.8, platform_height = 0.35;
  double gap_jitter = 0.015;    // uniform x-position jitter per gap, unscaled
  double height_jitter = 0.03;  // top-height jitter, scaled by difficulty
  double yaw_jitter = 0.05;     // rad, scaled by difficulty; obstacles only
  double max_gap_bound = 0.80;  // generation refuses gaps beyond this
  double cell = 0.02;           // raster resolution
  double half_width = 0.6;      // lateral heightfield extent
  double margin = 0.5;          // bare ground beyond the platforms
  DifficultyTable table;
};

/// Top-surface boundary segment of one solid (front and back edges), used by
/// the edge-penetration reward and serialized with the instance.
struct EdgeSegment {
  geom::Vec3 a = geom::Vec3::Zero();
  geom::Vec3 b = geom::Vec3::Zero();
};

struct PerturbSpec {
  double gap_widen = 0.0;      // metres added to every inter-platform gap
  double surface_noise = 0.0;  // max |dz| of per-node surface noise
  double yaw_skew = 0.0;       // max extra yaw per obstacle, rad
};

struct TerrainInstance {
  real2sim::SimReadyTerrain terrain;
  TerrainParams params;
  sim::TerrainProfile profile;      // centerline row of the rastered surface
  std::vector<EdgeSegment> edges;   // 2 per solid, left to right
  std::vector<double> gaps;         // realized gaps, left to right (n_obstacles + 1)
  std::vector<double> dims;         // primary obstacle dimension per obstacle
  std::string id;
};

/// Deterministic in (family, difficulty, seed). Start/end platforms are fixed
/// 0.9 x 0.8 x 0.35 m; obstacle footprints follow the difficulty table
/// exactly while gaps, top heights, and yaws are jittered from the seed.
/// Throws when a requested gap exceeds `max_gap_bound`.
TerrainInstance generate(const TerrainParams& params);

/// Out-of-distribution edits on top of an instance's generation recipe:
/// widened gaps (may exceed the pre-training table's gap_max), bounded
/// per-node surface noise, extra obstacle yaw. Deterministic in (base
/// params, spec, seed); an all-zero spec reproduces the base vertex-exactly.
TerrainInstance perturb(const TerrainInstance& base, const PerturbSpec& spec, std::uint64_t seed);

/// Scalar convenience: magnitude 1 widens gaps by 0.20 m, adds 1 cm surface
/// noise and 0.15 rad yaw skew, all scaled linearly.
TerrainInstance perturb(const TerrainInstance& base, double magnitude, std::uint64_t seed);

/// One curriculum cell. The full instance (mesh included) is materialized on
/// demand; the grid itself stores only what training needs.
struct GridCell {
  TerrainParams params;
  sim::TerrainProfile profile;
  std::string id;
};

struct CurriculumGrid {
  int rows = 0, cols = 0;
  std::vector<GridCell> cells;  // row-major

  const GridCell& at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col]; }
};

/// 10 rows x 20 columns: 5 families x 4 columns, row r at difficulty r/9,
/// per-cell seeds derived from (seed, row, col). `base` supplies everything
/// but family/difficulty/seed.
CurriculumGrid build_grid(std::uint64_t seed, const TerrainParams& base = {}, int rows = 10,
                          int cols = 20);

TerrainInstance materialize(const GridCell& cell);

/// Promote one row on success, demote one row on a stuck termination, clamp
/// to [0, rows-1]; any other outcome keeps the level.
int curriculum_update(int level, sim::Status outcome, int rows = 10);

/// All-flat grid (unmasked ground, goal near the far end) for smoke tests.
CurriculumGrid flat_grid(int rows = 10, int cols = 20, double length = 5.0);

/// base_path + ".obj" (mesh) and base_path + ".json" (params, frame metadata,
/// profile, edges). The JSON profile round-trips bit-exactly.
void save_instance(const TerrainInstance& inst, const std::string& base_path);
TerrainInstance load_instance(const std::string& base_path);

}  // namespace parkour::procgen
