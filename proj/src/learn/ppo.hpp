#pragma once

#include <cstdint>
#include <vector>

#include "learn/adam.hpp"
#include "nn/policy.hpp"

namespace parkour::learn {

struct PPOConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lam = 0.95;
  double lr = 3e-4;
  int epochs = 5;
  int minibatches = 4;
  int horizon = 48;
  int n_envs = 256;
  double entropy_coef = 0.005;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;

  void check() const;  // clip in (0,1); gamma, lam in (0,1]
  std::uint64_t digest() const;
};

/// One optimization batch. Columns are samples (t-major: column = t * n_envs
/// + e); actor and critic observations are kept separately because the critic
/// sees privileged fields.
struct RolloutBatch {
  nn::Mat actor_obs;   // actor_obs_dim x M
  nn::Mat critic_obs;  // critic_obs_dim x M
  nn::Mat actions;     // action_dim x M
  Eigen::VectorXd logp;        // behavior log-probs
  Eigen::VectorXd advantages;  // normalized inside ppo_update
  Eigen::VectorXd returns;
  Eigen::VectorXd values;  // V(s_t) under the behavior parameters

  int size() const { return static_cast<int>(logp.size()); }
};

struct PPOStats {
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double kl = 0;             // mean (ratio - 1 - log ratio) across updates
  double clip_fraction = 0;  // fraction of samples with |ratio - 1| > clip
  double grad_norm = 0;      // mean pre-clip norm
  int updates = 0;
  bool fault = false;  // non-finite loss/grad: update aborted, params restored
};

/// In-place shift/scale to zero mean, unit (population) std. A single sample
/// or a constant batch is centered only.
void normalize_advantages(Eigen::VectorXd& adv);

struct LossReport {
  double policy = 0, value = 0, entropy = 0, kl = 0, clip_fraction = 0;
  double total = 0;
};

/// PPO objective and its gradient over the columns listed in `idx`,
/// accumulated into `grad` (caller zeroes it; pass nullptr to skip).
/// total = policy + value_coef * value - entropy_coef * entropy.
LossReport ppo_loss_grad(const nn::ActorCritic& net, const RolloutBatch& batch,
                         const std::vector<int>& idx, const PPOConfig& cfg,
                         std::vector<double>* grad);

/// Normalizes advantages, then runs epochs x minibatches masked Adam steps.
/// Minibatch shuffling is seeded; a non-finite loss or gradient aborts the
/// whole update and restores the entry parameters.
PPOStats ppo_update(nn::ActorCritic& net, RolloutBatch& batch, const PPOConfig& cfg, Adam& opt,
                    const std::vector<std::uint8_t>& mask, std::uint64_t seed);

}  // namespace parkour::learn
