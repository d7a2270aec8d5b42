#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "learn/rollout.hpp"
#include "nn/checkpoint.hpp"

namespace parkour::learn {

/// Identity of every physics/sensor/observation/termination knob that shapes
/// the MDP; order-sensitive field-by-field hash.
std::uint64_t env_config_digest(const sim::EnvConfig& cfg);

struct PretrainConfig {
  PPOConfig ppo;
  RunnerConfig runner;
  int iterations = 2000;
  int checkpoint_every = 500;  // 0 disables periodic checkpoints
  int reward_log_every = 25;   // 0 disables the per-term reward log
  std::string out_dir;         // empty keeps everything in memory

  /// Covers optimizer, rewards, architecture, and environment.
  std::uint64_t digest(const nn::NetConfig& net) const;
};

/// One iteration of the training log (also a train_log.csv row on disk).
struct TrainRow {
  int iteration = 0;
  double mean_reward = 0;
  double success_rate = 0;  // finished-episode success fraction this iteration
  double policy_loss = 0, value_loss = 0, entropy = 0, kl = 0, clip_fraction = 0;
  double mean_level = 0;
  int episodes = 0;
  int faults = 0;  // env faults + 1 if the PPO update aborted
};

struct TrainState {
  nn::ActorCritic net;
  int iterations_run = 0;
  bool fault = false;  // latched when any PPO update aborted
  std::vector<TrainRow> history;
};

/// Rollout → GAE → PPO loop over the curriculum grid. Serial mode
/// (runner.threads == 1) is bitwise deterministic for a fixed seed; more
/// threads parallelize physics only and leave results identical.
TrainState pretrain(const procgen::CurriculumGrid& grid, const nn::NetConfig& net,
                    const PretrainConfig& cfg, std::uint64_t seed);

/// Deterministic mean-action rollouts: fraction of n_trials seeded episodes
/// that end in success.
double evaluate(const nn::ActorCritic& net, const sim::TerrainProfile& profile,
                const sim::EnvConfig& env_cfg, int n_trials, std::uint64_t seed);

}  // namespace parkour::learn
