#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>

#include "sim/observation.hpp"
#include "sim/termination.hpp"

namespace parkour::sim {

struct EnvConfig {
  double dt = 0.02;  // control period (50 Hz)
  int substeps = 4;
  double command_vx = 0.4;   // constant forward command
  double action_scale = 0.5;  // target = q_default + action_scale · a
  // reset jitter half-ranges (uniform, seeded)
  double jitter_x = 0.02;
  double jitter_pitch = 0.02;
  double jitter_q = 0.05;
  PhysicsConfig physics;
  SensorConfig sensor;
  ObsConfig obs;
  TerminationConfig term;
};

/// One control step of the episode record. `state` is the post-step state
/// (record 0 of a trajectory holds the initial state with zero action/tau).
struct TrajRecord {
  AgentState state;
  Vec4 action = Vec4::Zero();
  Vec4 tau = Vec4::Zero();
  StepEvents events;
  Status status = Status::running;
};

struct Trajectory {
  std::vector<TrajRecord> records;
  std::uint64_t seed = 0;
  std::string terrain_id;
  double command_vx = 0;
  double dt = 0.02;

  int steps() const { return static_cast<int>(records.size()) - 1; }
  Status final_status() const {
    return records.empty() ? Status::running : records.back().status;
  }
};

/// Little-endian f32 record stream with a self-describing header.
void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);

/// Everything the reward registry needs about one step.
struct StepData {
  AgentState prev, next;
  Vec4 action = Vec4::Zero();
  Vec4 action_prev = Vec4::Zero();
  Vec4 tau = Vec4::Zero();
  StepEvents events;
  double command_vx = 0;
  double dt = 0.02;
  Status status = Status::running;
};

/// A single planar parkour environment. Owns its state and RNG stream; a
/// profile is borrowed and must outlive the episode. Deterministic given
/// (seed, profile, action sequence).
class Environment {
 public:
  explicit Environment(const EnvConfig& cfg);

  /// Starts an episode on `profile` with jittered initial state. The profile
  /// pointer is held until the next reset.
  Observation reset(const TerrainProfile* profile, std::uint64_t seed);

  /// Applies the policy action, advances one control step. The observation is
  /// for the *next* decision; `data.status` reports the post-step status.
  Observation step(const Vec4& action, StepData* data = nullptr);

  /// Overrides the forward command for subsequent observations and steps
  /// (training samples a fresh command each episode).
  void set_command_vx(double v) { cfg_.command_vx = v; }

  Status status() const { return status_; }
  const AgentState& state() const { return state_; }
  const TerrainProfile& profile() const { return *profile_; }
  const EnvConfig& config() const { return cfg_; }
  int steps_taken() const { return steps_; }
  int actor_dim() const { return assembler_.actor_dim(); }
  int critic_dim() const { return assembler_.critic_dim(); }

 private:
  EnvConfig cfg_;
  const TerrainProfile* profile_ = nullptr;
  AgentState state_;
  ObservationAssembler assembler_;
  std::deque<double> progress_;
  std::size_t progress_cap_ = 0;
  Vec4 action_prev_ = Vec4::Zero();
  std::mt19937_64 rng_;
  Status status_ = Status::running;
  int steps_ = 0;

  Observation observe();
};

using PolicyFn = std::function<Vec4(const Observation&)>;

/// Full episode rollout under `policy`; returns the trajectory (including the
/// initial snapshot) and the terminal status. Identical inputs give identical
/// trajectories.
std::pair<Trajectory, Status> run_episode(const PolicyFn& policy, const TerrainProfile& profile,
                                          const EnvConfig& cfg, std::uint64_t seed,
                                          int max_steps = -1);

}  // namespace parkour::sim
