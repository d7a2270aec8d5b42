#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sim/env.hpp"

namespace parkour::rewards {

using sim::Vec2;
using sim::Vec4;

// Every row of the reward table, in table order. Rows whose quantity has no
// planar coordinate (lateral, yaw, upper body, foot attitude relative to a
// sole) are registered but disabled by default, so a 3D extension changes
// flags rather than the schema.
enum class Term : int {
  lin_vel_tracking = 0,
  ang_vel_tracking,  // disabled: no yaw rate planar
  heading_error,     // |ω*_z| with ω*_z ≡ 0 planar
  dont_wait,
  is_alive,
  stand_still,
  edge_penetration,
  feet_air_time,
  feet_slide,
  joint_deviation_hip,  // disabled: no hip roll/yaw to pin
  base_ang_vel,
  joint_torques,
  joint_acc,
  joint_vel,
  action_rate,
  flat_orientation,
  pelvis_orientation,  // disabled: merged into flat_orientation planar
  feet_orientation,
  feet_height_error,
  feet_distance,  // disabled: lateral spacing has no planar coordinate
  energy,
  freeze_upper_body,  // disabled: no upper-body joints
  joint_pos_limits,
  joint_vel_limits,
  torque_limits,
  undesired_contacts,
  amp_style,
  count
};

constexpr int kNumTerms = static_cast<int>(Term::count);

const char* term_name(Term t);

struct RewardConfig {
  std::array<double, kNumTerms> weight{};
  std::array<bool, kNumTerms> enabled{};

  static RewardConfig defaults();

  double& operator[](Term t) { return weight[static_cast<int>(t)]; }
  double operator[](Term t) const { return weight[static_cast<int>(t)]; }
  bool is_enabled(Term t) const { return enabled[static_cast<int>(t)]; }
  void set_enabled(Term t, bool on) { enabled[static_cast<int>(t)] = on; }

  /// FNV-1a over the canonical byte layout; equal configs hash equal, so
  /// pre-training and test-time training can assert they share one config.
  std::uint64_t digest() const;
};

/// Everything one step's reward evaluation reads. Snapshot values mirror the
/// trajectory record so online computation and offline replay see identical
/// inputs (doubles end to end).
struct StepContext {
  // post-step state
  double x = 0, z = 0, theta = 0;
  double xd = 0, zd = 0, omega = 0;
  Vec4 q = Vec4::Zero();
  Vec4 qd = Vec4::Zero();
  // pre-step joint velocities (for q̈ estimation)
  Vec4 qd_prev = Vec4::Zero();
  Vec4 action = Vec4::Zero();
  Vec4 action_prev = Vec4::Zero();
  Vec4 tau = Vec4::Zero();
  double command_vx = 0;
  double dt = 0.02;
  std::array<bool, 2> contact{false, false};
  std::array<double, 2> air_time{0, 0};
  std::array<double, 2> contact_time{0, 0};
  std::array<Vec2, 2> foot_pos{Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 2> foot_vel{Vec2::Zero(), Vec2::Zero()};
  double amp_score = 1.0;  // injected discriminator output; 1 = neutral
  const sim::TerrainProfile* profile = nullptr;
  const sim::PhysicsConfig* physics = nullptr;
};

/// Builds the context for the step `data` describes.
StepContext make_context(const sim::PhysicsConfig& physics, const sim::TerrainProfile& profile,
                         const sim::StepData& data, double amp_score = 1.0);

struct RewardBreakdown {
  std::array<double, kNumTerms> raw{};
  std::array<double, kNumTerms> weighted{};
  double total = 0;

  double raw_of(Term t) const { return raw[static_cast<int>(t)]; }
  double weighted_of(Term t) const { return weighted[static_cast<int>(t)]; }
};

/// Evaluates every enabled term. total = Σ weighted.
RewardBreakdown compute_rewards(const StepContext& ctx, const RewardConfig& cfg);

/// max[0, 1 − 0.25(D − 1)²] — bounded to [0, 1] for all finite D.
double amp_style(double d_score);

/// Per contact foot within ±band of an edge marker: depth·(speed + ε), where
/// depth = band − |x_foot − x_edge| against the nearest marker.
double edge_penetration(const std::array<Vec2, 2>& foot_pos, const std::array<Vec2, 2>& foot_vel,
                        const std::array<bool, 2>& contact, const std::vector<double>& edges,
                        double band, double eps);

/// Recomputes per-step rewards from a stored trajectory. For a trajectory
/// still in memory this reproduces the online values bit for bit; a file
/// round-trip re-quantizes to f32 first.
std::vector<RewardBreakdown> replay_rewards(const sim::Trajectory& traj,
                                            const sim::PhysicsConfig& physics,
                                            const sim::TerrainProfile& profile,
                                            const RewardConfig& cfg);

/// Appends per-term means as CSV rows: iteration, term, mean_raw, mean_weighted.
void append_reward_csv(const std::string& path, int iteration,
                       const std::vector<RewardBreakdown>& steps);

}  // namespace parkour::rewards
