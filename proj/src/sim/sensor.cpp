#include "sim/sensor.hpp"

#include <algorithm>

namespace parkour::sim {

DepthScan sense_depth(const SensorConfig& cfg, const PhysicsConfig& phys, const AgentState& state,
                      const TerrainProfile& profile) {
  const Vec2 origin = head_pos(phys, state);
  DepthScan scan(cfg.n_rays);
  const double span = cfg.angle_hi - cfg.angle_lo;
  for (int i = 0; i < cfg.n_rays; ++i) {
    const double body_angle =
        cfg.n_rays == 1 ? cfg.angle_lo : cfg.angle_lo + span * i / (cfg.n_rays - 1);
    const double world_angle = body_angle + state.theta;
    const Vec2 dir(std::cos(world_angle), std::sin(world_angle));
    const auto t = ray_profile(profile, origin, dir);
    scan[i] = std::clamp(t.value_or(cfg.d_max), cfg.d_min, cfg.d_max);
  }
  return scan;
}

}  // namespace parkour::sim
