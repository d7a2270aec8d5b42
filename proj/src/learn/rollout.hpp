#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "common/rng.hpp"
#include "common/thread_pool.hpp"
#include "learn/ppo.hpp"
#include "procgen/procgen.hpp"
#include "rewards/rewards.hpp"
#include "sim/env.hpp"

namespace parkour::learn {

struct RunnerConfig {
  sim::EnvConfig env;
  rewards::RewardConfig rewards = rewards::RewardConfig::defaults();
  double command_lo = 0.4, command_hi = 1.0;  // per-episode forward command
  int threads = 1;                            // 1 = serial; physics only
};

/// Aggregates of one collected horizon.
struct IterStats {
  double mean_reward = 0;    // mean weighted step reward
  int episodes = 0;          // episodes finished during the horizon
  int successes = 0;
  double success_rate = 0;   // successes / episodes (0 when none finished)
  double mean_level = 0;     // average curriculum row across envs
  int faults = 0;            // non-finite observations (env was reset)
  std::array<double, rewards::kNumTerms> term_raw{};       // per-step means
  std::array<double, rewards::kNumTerms> term_weighted{};
};

/// N parallel environments walking a curriculum grid. Each env is pinned to a
/// grid column (env e -> column e mod cols) and carries its own row index,
/// moved by curriculum_update at every episode end. All random draws (action
/// noise, reset seeds, commands) come from per-env streams consumed in env
/// order, so results are identical for any thread count.
class VecRunner {
 public:
  VecRunner(const procgen::CurriculumGrid* grid, const RunnerConfig& cfg, int n_envs,
            std::uint64_t seed);

  /// Collects cfg.horizon steps from every env into a PPO batch (advantages
  /// and returns already computed with cfg.gamma/cfg.lam).
  IterStats collect(const nn::ActorCritic& net, const PPOConfig& cfg, RolloutBatch& batch);

  int n_envs() const { return static_cast<int>(envs_.size()); }
  const std::vector<int>& levels() const { return levels_; }

 private:
  void reset_env(int e, sim::Status outcome, IterStats* stats);

  const procgen::CurriculumGrid* grid_;
  RunnerConfig cfg_;
  ThreadPool pool_;
  std::vector<std::unique_ptr<sim::Environment>> envs_;
  std::vector<Rng> streams_;       // reset seeds, commands, action noise
  std::vector<int> levels_, cols_;
  std::vector<sim::Observation> obs_;
  std::vector<double> episode_reward_;
  Eigen::VectorXd log_std_cache_;
};

}  // namespace parkour::learn
