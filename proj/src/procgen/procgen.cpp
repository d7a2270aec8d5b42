#include "procgen/procgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "common/hash.hpp"
#include "common/rng.hpp"
#include "geom/heightfield.hpp"
#include "geom/mesh_query.hpp"
#include "geom/obj.hpp"

namespace parkour::procgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaskBand = 0.05;   // ground-contact failure band
constexpr double kEdgeJump = 0.1;    // profile discontinuity -> edge marker
constexpr double kTrapRimHeight = 0.12;  // trapezoid side ramps stop above ground
constexpr double kTrapSlope = 1.7320508075688772;  // tan(60 deg) side ramps

enum class TopKind { flat, roof, frustum };

/// One box-footprint surface piece. `half_len` is along the (yawed) traversal
/// axis; the top is flat, a roof ridge, or a plateau with side ramps.
struct Solid {
  double cx = 0, cy = 0;
  double half_len = 0, half_wid = 0;
  double yaw = 0;
  TopKind kind = TopKind::flat;
  double top = 0;     // flat/eave/plateau height
  double slope = 0;   // roof/frustum rise per metre toward the center
};

double solid_top(const Solid& s, double x, double y) {
  const double c = std::cos(s.yaw), sn = std::sin(s.yaw);
  const double dx = x - s.cx, dy = y - s.cy;
  const double u = c * dx + sn * dy;
  const double v = -sn * dx + c * dy;
  if (std::abs(u) > s.half_len || std::abs(v) > s.half_wid) return 0.0;
  switch (s.kind) {
    case TopKind::flat:
      return s.top;
    case TopKind::roof:
      return s.top + (s.half_len - std::abs(u)) * s.slope;
    case TopKind::frustum:
      return std::min(s.top, kTrapRimHeight + (s.half_len - std::abs(u)) * kTrapSlope);
  }
  return 0.0;
}

// std::lerp is exact at t = 0 and t = 1, so difficulty endpoints hit the
// table values bit-for-bit.
using std::lerp;

struct Layout {
  std::vector<Solid> solids;  // start platform, obstacles, end platform
  std::vector<double> gaps;
  std::vector<double> dims;
  std::vector<EdgeSegment> edges;
  double end_cx = 0;      // end platform center
  double end_left = 0;    // end platform left edge
  double x_right = 0;     // end platform right edge
};

TerrainFamily pick_family(TerrainFamily f, Rng& rng) {
  if (f != TerrainFamily::Mixed) return f;
  static constexpr TerrainFamily kConcrete[5] = {TerrainFamily::Wedges, TerrainFamily::Stakes,
                                                 TerrainFamily::Boxes, TerrainFamily::Trapezoids,
                                                 TerrainFamily::NarrowBeams};
  return kConcrete[rng.uniform_index(5)];
}

/// Places start platform, obstacles, end platform left to right. Gap widths,
/// top heights, and yaws come from the instance rng; footprint dims are exact
/// table lerps. Perturbation widens every gap and skews obstacle yaws.
Layout layout_solids(const TerrainParams& p, const PerturbSpec& spec, std::uint64_t perturb_seed) {
  const double d = std::clamp(p.difficulty, 0.0, 1.0);
  const DifficultyTable& t = p.table;
  Rng rng(derive_seed(p.seed, 0x70726f636765ULL));
  Rng skew_rng(derive_seed(perturb_seed, 0x79617773ULL));

  Layout out;
  const double ph = p.platform_height;
  out.solids.push_back({0.0, 0.0, p.platform_len / 2, p.platform_width / 2, 0.0, TopKind::flat,
                        ph, 0.0});
  double cursor = p.platform_len / 2;

  auto draw_gap = [&]() {
    double g = lerp(t.gap_min, t.gap_max, d) + rng.uniform(-p.gap_jitter, p.gap_jitter);
    if (spec.gap_widen != 0.0) g += spec.gap_widen;
    if (g <= 0.0 || g > p.max_gap_bound)
      throw std::invalid_argument("generate: gap outside (0, max_gap_bound]");
    out.gaps.push_back(g);
    return g;
  };

  for (int i = 0; i < p.n_obstacles; ++i) {
    const double gap = draw_gap();
    const TerrainFamily fam = pick_family(p.family, rng);

    Solid s;
    s.kind = TopKind::flat;
    s.half_wid = p.platform_width / 2 * 0.95;
    double dim = 0;
    switch (fam) {
      case TerrainFamily::Boxes:
        dim = lerp(t.box_len_max, t.box_len_min, d);
        s.half_len = dim / 2;
        break;
      case TerrainFamily::Stakes:
        dim = lerp(t.stake_top_max, t.stake_top_min, d);
        s.half_len = s.half_wid = dim / 2;
        break;
      case TerrainFamily::NarrowBeams:
        dim = lerp(t.beam_width_max, t.beam_width_min, d);
        s.half_len = 0.40;
        s.half_wid = dim / 2;
        break;
      case TerrainFamily::Wedges: {
        // Difficulty steepens the roof; the footprint itself is fixed.
        const double deg = lerp(t.wedge_slope_min_deg, t.wedge_slope_max_deg, d);
        dim = 0.60;
        s.kind = TopKind::roof;
        s.half_len = dim / 2;
        s.slope = std::tan(deg * kPi / 180.0);
        break;
      }
      case TerrainFamily::Trapezoids: {
        dim = lerp(t.trap_top_max, t.trap_top_min, d);
        s.kind = TopKind::frustum;
        s.half_len = dim / 2 + (ph - kTrapRimHeight) / kTrapSlope;
        break;
      }
      case TerrainFamily::Mixed:
        throw std::logic_error("pick_family returned Mixed");
    }
    s.top = ph + rng.uniform(-1.0, 1.0) * p.height_jitter * d;
    s.yaw = rng.uniform(-1.0, 1.0) * p.yaw_jitter * d;
    if (spec.yaw_skew != 0.0) s.yaw += skew_rng.uniform(-spec.yaw_skew, spec.yaw_skew);
    s.cx = cursor + gap + s.half_len;
    cursor = s.cx + s.half_len;
    out.solids.push_back(s);
    out.dims.push_back(dim);
  }

  const double end_gap = draw_gap();
  out.end_left = cursor + end_gap;
  out.end_cx = out.end_left + p.platform_len / 2;
  out.x_right = out.end_left + p.platform_len;
  out.solids.push_back({out.end_cx, 0.0, p.platform_len / 2, p.platform_width / 2, 0.0,
                        TopKind::flat, ph, 0.0});

  for (const Solid& s : out.solids) {
    // Collision edges: the front/back boundary of the walkable top (for a
    // frustum that is the plateau rim, not the ramp foot).
    const double ul = s.kind == TopKind::frustum ? s.half_len - (s.top - kTrapRimHeight) / kTrapSlope
                                                 : s.half_len;
    const double c = std::cos(s.yaw), sn = std::sin(s.yaw);
    for (const double u : {-ul, ul}) {
      EdgeSegment e;
      e.a = geom::Vec3(s.cx + c * u - sn * s.half_wid, s.cy + sn * u + c * s.half_wid, s.top);
      e.b = geom::Vec3(s.cx + c * u + sn * s.half_wid, s.cy + sn * u - c * s.half_wid, s.top);
      out.edges.push_back(e);
    }
  }
  return out;
}

geom::HeightField rasterize(const TerrainParams& p, const Layout& lay, double noise_amp,
                            std::uint64_t noise_seed) {
  const double x_lo = -(p.platform_len / 2 + p.margin);
  const double x_hi = lay.x_right + p.margin;
  const int iy_center = static_cast<int>(std::llround(p.half_width / p.cell));
  const int nx = static_cast<int>(std::ceil((x_hi - x_lo) / p.cell - 1e-9)) + 1;
  geom::HeightField hf =
      geom::HeightField::filled(x_lo, -(iy_center * p.cell), p.cell, nx, 2 * iy_center + 1, 0.0);
  for (int iy = 0; iy < hf.ny; ++iy) {
    const double y = hf.node_y(iy);
    for (int ix = 0; ix < hf.nx; ++ix) {
      const double x = hf.node_x(ix);
      double z = 0.0;
      for (const Solid& s : lay.solids) z = std::max(z, solid_top(s, x, y));
      if (noise_amp > 0.0 && z > 0.0) {
        std::uint64_t h = hash_mix(hash_mix(hash_mix(kFnvOffset, noise_seed),
                                            static_cast<std::uint64_t>(ix)),
                                   static_cast<std::uint64_t>(iy));
        z += noise_amp * (2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0);
      }
      hf.at(ix, iy) = z;
    }
  }
  return hf;
}

std::string make_id(const TerrainParams& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s-d%.3f-s%llu", family_name(p.family),
                std::clamp(p.difficulty, 0.0, 1.0),
                static_cast<unsigned long long>(p.seed));
  return buf;
}

TerrainInstance generate_impl(const TerrainParams& p, const PerturbSpec& spec,
                              std::uint64_t perturb_seed) {
  if (p.n_obstacles < 0 || p.cell <= 0 || p.platform_len <= 0 || p.platform_width <= 0 ||
      p.platform_height <= 0 || p.half_width <= 0 || p.margin < 0)
    throw std::invalid_argument("generate: invalid params");

  const Layout lay = layout_solids(p, spec, perturb_seed);
  const geom::HeightField hf = rasterize(p, lay, spec.surface_noise, perturb_seed);
  const int iy_center = (hf.ny - 1) / 2;

  TerrainInstance inst;
  inst.params = p;
  inst.gaps = lay.gaps;
  inst.dims = lay.dims;
  inst.edges = lay.edges;
  inst.id = make_id(p);

  sim::TerrainProfile& prof = inst.profile;
  prof.x0 = hf.x0;
  prof.dx = hf.cell;
  prof.samples.resize(hf.nx);
  prof.ground_mask.resize(hf.nx);
  for (int ix = 0; ix < hf.nx; ++ix) {
    prof.samples[ix] = hf.at(ix, iy_center);
    prof.ground_mask[ix] = prof.samples[ix] <= kMaskBand;
  }
  for (int ix = 0; ix + 1 < hf.nx; ++ix)
    if (std::abs(prof.samples[ix + 1] - prof.samples[ix]) > kEdgeJump)
      prof.edge_markers.push_back(prof.x0 + (ix + 0.5) * prof.dx);
  prof.goal_x = lay.end_cx;
  prof.end_min_x = lay.end_left;
  prof.check();

  real2sim::SimReadyTerrain& t = inst.terrain;
  t.mesh = geom::mesh_heightfield(hf, 0.0, true);
  t.start_centroid = geom::Vec3(0.0, 0.0, p.platform_height);
  t.end_centroid = geom::Vec3(lay.end_cx, 0.0, p.platform_height);
  t.ground_height = 0.0;
  const geom::MeshBounds b = geom::mesh_bounds(t.mesh);
  t.bounds_lo = b.lo;
  t.bounds_hi = b.hi;
  return inst;
}

}  // namespace

const char* family_name(TerrainFamily f) {
  switch (f) {
    case TerrainFamily::Wedges: return "wedges";
    case TerrainFamily::Stakes: return "stakes";
    case TerrainFamily::Boxes: return "boxes";
    case TerrainFamily::Trapezoids: return "trapezoids";
    case TerrainFamily::NarrowBeams: return "narrow-beams";
    case TerrainFamily::Mixed: return "mixed";
  }
  return "unknown";
}

TerrainFamily family_from_name(const std::string& name) {
  for (const TerrainFamily f : {TerrainFamily::Wedges, TerrainFamily::Stakes, TerrainFamily::Boxes,
                                TerrainFamily::Trapezoids, TerrainFamily::NarrowBeams,
                                TerrainFamily::Mixed})
    if (name == family_name(f)) return f;
  throw std::invalid_argument("unknown terrain family: " + name);
}

TerrainInstance generate(const TerrainParams& params) {
  return generate_impl(params, PerturbSpec{}, 0);
}

TerrainInstance perturb(const TerrainInstance& base, const PerturbSpec& spec, std::uint64_t seed) {
  if (spec.gap_widen < 0 || spec.surface_noise < 0 || spec.yaw_skew < 0)
    throw std::invalid_argument("perturb: negative magnitudes");
  TerrainInstance out = generate_impl(base.params, spec, seed);
  char buf[64];
  std::snprintf(buf, sizeof buf, "-p%.3f-%.3f-%.3f-s%llu", spec.gap_widen, spec.surface_noise,
                spec.yaw_skew, static_cast<unsigned long long>(seed));
  out.id = base.id + buf;
  return out;
}

TerrainInstance perturb(const TerrainInstance& base, double magnitude, std::uint64_t seed) {
  if (magnitude < 0) throw std::invalid_argument("perturb: negative magnitude");
  PerturbSpec spec;
  spec.gap_widen = 0.20 * magnitude;
  spec.surface_noise = 0.01 * magnitude;
  spec.yaw_skew = 0.15 * magnitude;
  return perturb(base, spec, seed);
}

CurriculumGrid build_grid(std::uint64_t seed, const TerrainParams& base, int rows, int cols) {
  if (rows < 1 || cols < 5) throw std::invalid_argument("build_grid: bad shape");
  static constexpr TerrainFamily kFamilies[5] = {TerrainFamily::Wedges, TerrainFamily::Stakes,
                                                 TerrainFamily::Boxes, TerrainFamily::Trapezoids,
                                                 TerrainFamily::NarrowBeams};
  CurriculumGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.cells.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      TerrainParams p = base;
      p.family = kFamilies[c * 5 / cols];
      p.difficulty = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.0;
      p.seed = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(r)),
                           static_cast<std::uint64_t>(c));
      GridCell cell;
      cell.params = p;
      TerrainInstance inst = generate(p);
      cell.profile = std::move(inst.profile);
      cell.id = std::move(inst.id);
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

TerrainInstance materialize(const GridCell& cell) { return generate(cell.params); }

int curriculum_update(int level, sim::Status outcome, int rows) {
  if (outcome == sim::Status::success) ++level;
  else if (outcome == sim::Status::fail_stuck) --level;
  return std::clamp(level, 0, rows - 1);
}

CurriculumGrid flat_grid(int rows, int cols, double length) {
  CurriculumGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.cells.resize(static_cast<std::size_t>(rows) * cols);
  for (GridCell& cell : grid.cells) {
    cell.profile = sim::TerrainProfile::flat(-1.0, length, 0.0);
    cell.id = "flat";
  }
  return grid;
}

namespace {

runio::Json params_to_json(const TerrainParams& p) {
  runio::Json j = runio::Json::object();
  j["family"] = runio::Json(family_name(p.family));
  j["difficulty"] = runio::Json(p.difficulty);
  j["seed"] = runio::Json(std::to_string(p.seed));
  j["n_obstacles"] = runio::Json(static_cast<double>(p.n_obstacles));
  j["platform_len"] = runio::Json(p.platform_len);
  j["platform_width"] = runio::Json(p.platform_width);
  j["platform_height"] = runio::Json(p.platform_height);
  j["gap_jitter"] = runio::Json(p.gap_jitter);
  j["height_jitter"] = runio::Json(p.height_jitter);
  j["yaw_jitter"] = runio::Json(p.yaw_jitter);
  j["max_gap_bound"] = runio::Json(p.max_gap_bound);
  j["cell"] = runio::Json(p.cell);
  j["half_width"] = runio::Json(p.half_width);
  j["margin"] = runio::Json(p.margin);
  runio::Json tbl = runio::Json::object();
  tbl["gap_min"] = runio::Json(p.table.gap_min);
  tbl["gap_max"] = runio::Json(p.table.gap_max);
  tbl["box_len_max"] = runio::Json(p.table.box_len_max);
  tbl["box_len_min"] = runio::Json(p.table.box_len_min);
  tbl["beam_width_max"] = runio::Json(p.table.beam_width_max);
  tbl["beam_width_min"] = runio::Json(p.table.beam_width_min);
  tbl["stake_top_max"] = runio::Json(p.table.stake_top_max);
  tbl["stake_top_min"] = runio::Json(p.table.stake_top_min);
  tbl["wedge_slope_min_deg"] = runio::Json(p.table.wedge_slope_min_deg);
  tbl["wedge_slope_max_deg"] = runio::Json(p.table.wedge_slope_max_deg);
  tbl["trap_top_max"] = runio::Json(p.table.trap_top_max);
  tbl["trap_top_min"] = runio::Json(p.table.trap_top_min);
  j["table"] = std::move(tbl);
  return j;
}

TerrainParams params_from_json(const runio::Json& j) {
  TerrainParams p;
  p.family = family_from_name(j.at("family").as_string());
  p.difficulty = j.at("difficulty").as_number();
  p.seed = std::stoull(j.at("seed").as_string());
  p.n_obstacles = static_cast<int>(j.at("n_obstacles").as_number());
  p.platform_len = j.at("platform_len").as_number();
  p.platform_width = j.at("platform_width").as_number();
  p.platform_height = j.at("platform_height").as_number();
  p.gap_jitter = j.at("gap_jitter").as_number();
  p.height_jitter = j.at("height_jitter").as_number();
  p.yaw_jitter = j.at("yaw_jitter").as_number();
  p.max_gap_bound = j.at("max_gap_bound").as_number();
  p.cell = j.at("cell").as_number();
  p.half_width = j.at("half_width").as_number();
  p.margin = j.at("margin").as_number();
  const runio::Json& tbl = j.at("table");
  p.table.gap_min = tbl.at("gap_min").as_number();
  p.table.gap_max = tbl.at("gap_max").as_number();
  p.table.box_len_max = tbl.at("box_len_max").as_number();
  p.table.box_len_min = tbl.at("box_len_min").as_number();
  p.table.beam_width_max = tbl.at("beam_width_max").as_number();
  p.table.beam_width_min = tbl.at("beam_width_min").as_number();
  p.table.stake_top_max = tbl.at("stake_top_max").as_number();
  p.table.stake_top_min = tbl.at("stake_top_min").as_number();
  p.table.wedge_slope_min_deg = tbl.at("wedge_slope_min_deg").as_number();
  p.table.wedge_slope_max_deg = tbl.at("wedge_slope_max_deg").as_number();
  p.table.trap_top_max = tbl.at("trap_top_max").as_number();
  p.table.trap_top_min = tbl.at("trap_top_min").as_number();
  return p;
}

runio::Json vec_to_json(const std::vector<double>& v) {
  runio::Json arr = runio::Json::array();
  for (const double x : v) arr.push_back(runio::Json(x));
  return arr;
}

std::vector<double> vec_from_json(const runio::Json& arr) {
  std::vector<double> v;
  v.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v.push_back(arr.at(i).as_number());
  return v;
}

}  // namespace

void save_instance(const TerrainInstance& inst, const std::string& base_path) {
  geom::write_obj(base_path + ".obj", inst.terrain.mesh);

  runio::Json j = runio::Json::object();
  j["id"] = runio::Json(inst.id);
  j["params"] = params_to_json(inst.params);
  j["terrain"] = real2sim::terrain_meta_json(inst.terrain);

  runio::Json prof = runio::Json::object();
  prof["x0"] = runio::Json(inst.profile.x0);
  prof["dx"] = runio::Json(inst.profile.dx);
  prof["goal_x"] = runio::Json(inst.profile.goal_x);
  prof["end_min_x"] = runio::Json(inst.profile.end_min_x);
  prof["samples"] = vec_to_json(inst.profile.samples);
  runio::Json mask = runio::Json::array();
  for (const bool m : inst.profile.ground_mask) mask.push_back(runio::Json(m));
  prof["ground_mask"] = std::move(mask);
  prof["edge_markers"] = vec_to_json(inst.profile.edge_markers);
  j["profile"] = std::move(prof);

  runio::Json edges = runio::Json::array();
  for (const EdgeSegment& e : inst.edges) {
    runio::Json seg = runio::Json::array();
    for (const double x : {e.a.x(), e.a.y(), e.a.z(), e.b.x(), e.b.y(), e.b.z()})
      seg.push_back(runio::Json(x));
    edges.push_back(std::move(seg));
  }
  j["edges"] = std::move(edges);
  j["gaps"] = vec_to_json(inst.gaps);
  j["dims"] = vec_to_json(inst.dims);
  runio::json_to_file(base_path + ".json", j, 1);
}

TerrainInstance load_instance(const std::string& base_path) {
  const runio::Json j = runio::json_from_file(base_path + ".json");
  TerrainInstance inst;
  inst.id = j.at("id").as_string();
  inst.params = params_from_json(j.at("params"));
  inst.terrain = real2sim::terrain_from_meta_json(j.at("terrain"));
  inst.terrain.mesh = geom::read_obj(base_path + ".obj");

  const runio::Json& prof = j.at("profile");
  inst.profile.x0 = prof.at("x0").as_number();
  inst.profile.dx = prof.at("dx").as_number();
  inst.profile.goal_x = prof.at("goal_x").as_number();
  inst.profile.end_min_x = prof.at("end_min_x").as_number();
  inst.profile.samples = vec_from_json(prof.at("samples"));
  const runio::Json& mask = prof.at("ground_mask");
  inst.profile.ground_mask.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) inst.profile.ground_mask[i] = mask.at(i).as_bool();
  inst.profile.edge_markers = vec_from_json(prof.at("edge_markers"));
  inst.profile.check();

  const runio::Json& edges = j.at("edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const runio::Json& seg = edges.at(i);
    EdgeSegment e;
    e.a = geom::Vec3(seg.at(0).as_number(), seg.at(1).as_number(), seg.at(2).as_number());
    e.b = geom::Vec3(seg.at(3).as_number(), seg.at(4).as_number(), seg.at(5).as_number());
    inst.edges.push_back(e);
  }
  inst.gaps = vec_from_json(j.at("gaps"));
  inst.dims = vec_from_json(j.at("dims"));
  return inst;
}

}  // namespace parkour::procgen
