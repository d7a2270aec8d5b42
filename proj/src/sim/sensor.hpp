#pragma once

#include "sim/agent.hpp"
#include "sim/profile.hpp"

namespace parkour::sim {

/// Planar ray-cast depth sensor: a fan of rays pitched below the horizon,
/// rigidly attached to the torso (angles are body-frame).
struct SensorConfig {
  int n_rays = 32;
  double angle_lo = -75.0 * M_PI / 180.0;  // most downward ray
  double angle_hi = -10.0 * M_PI / 180.0;  // most forward ray
  double d_min = 0.05;
  double d_max = 5.0;
};

using DepthScan = std::vector<double>;  // n_rays distances, clipped to [d_min, d_max]

/// Casts the fan from the head point; misses and out-of-range hits clip to the
/// sensor bounds. Deterministic.
DepthScan sense_depth(const SensorConfig& cfg, const PhysicsConfig& phys, const AgentState& state,
                      const TerrainProfile& profile);

}  // namespace parkour::sim
