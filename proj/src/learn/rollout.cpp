#include "learn/rollout.hpp"

#include <cmath>
#include <stdexcept>

#include "learn/gae.hpp"

namespace parkour::learn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

bool all_finite(const std::vector<float>& v) {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void fill_column(nn::Mat& m, int col, const std::vector<float>& v) {
  for (int i = 0; i < m.rows(); ++i) m(i, col) = static_cast<double>(v[static_cast<size_t>(i)]);
}

}  // namespace

VecRunner::VecRunner(const procgen::CurriculumGrid* grid, const RunnerConfig& cfg, int n_envs,
                     std::uint64_t seed)
    : grid_(grid), cfg_(cfg), pool_(cfg.threads) {
  if (grid_ == nullptr || grid_->rows < 1 || grid_->cols < 1)
    throw std::invalid_argument("rollout: empty curriculum grid");
  if (n_envs < 1) throw std::invalid_argument("rollout: n_envs must be positive");
  envs_.reserve(static_cast<size_t>(n_envs));
  streams_.reserve(static_cast<size_t>(n_envs));
  for (int e = 0; e < n_envs; ++e) {
    envs_.push_back(std::make_unique<sim::Environment>(cfg_.env));
    streams_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(e)));
    levels_.push_back(0);
    cols_.push_back(e % grid_->cols);
  }
  obs_.resize(static_cast<size_t>(n_envs));
  episode_reward_.assign(static_cast<size_t>(n_envs), 0.0);
  for (int e = 0; e < n_envs; ++e) reset_env(e, sim::Status::running, nullptr);
}

void VecRunner::reset_env(int e, sim::Status outcome, IterStats* stats) {
  if (outcome != sim::Status::running) {
    levels_[static_cast<size_t>(e)] =
        procgen::curriculum_update(levels_[static_cast<size_t>(e)], outcome, grid_->rows);
    if (stats != nullptr) {
      ++stats->episodes;
      if (outcome == sim::Status::success) ++stats->successes;
    }
    episode_reward_[static_cast<size_t>(e)] = 0.0;
  }
  const procgen::GridCell& cell =
      grid_->at(levels_[static_cast<size_t>(e)], cols_[static_cast<size_t>(e)]);
  // Command first, seed second: both come from the env's stream, in a fixed
  // order, so episode boundaries never shift draws between consumers.
  envs_[static_cast<size_t>(e)]->set_command_vx(
      streams_[static_cast<size_t>(e)].uniform(cfg_.command_lo, cfg_.command_hi));
  obs_[static_cast<size_t>(e)] =
      envs_[static_cast<size_t>(e)]->reset(&cell.profile, streams_[static_cast<size_t>(e)].next_u64());
}

IterStats VecRunner::collect(const nn::ActorCritic& net, const PPOConfig& cfg,
                             RolloutBatch& batch) {
  cfg.check();
  const int N = n_envs();
  const int T = cfg.horizon;
  const int M = T * N;
  const int A = envs_[0]->actor_dim();
  const int C = envs_[0]->critic_dim();
  const int K = net.config().action_dim;
  if (net.config().actor_obs_dim() != A || net.config().critic_obs_dim() != C)
    throw std::invalid_argument("rollout: network and environment observation sizes differ");

  batch.actor_obs.resize(A, M);
  batch.critic_obs.resize(C, M);
  batch.actions.resize(K, M);
  batch.logp.resize(M);
  batch.advantages.resize(M);
  batch.returns.resize(M);
  batch.values.resize(M);

  IterStats stats;
  nn::Mat obs_a(A, N), obs_c(C, N);
  nn::Mat rewards_grid(T, N), values_grid(T, N);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> dones(T, N);
  dones.setConstant(false);
  nn::ActorCache acache;
  nn::CriticCache ccache;
  std::vector<sim::StepData> step_data(static_cast<size_t>(N));
  std::vector<rewards::RewardBreakdown> breakdown(static_cast<size_t>(N));
  log_std_cache_ = net.log_std();
  const Eigen::VectorXd sigma = log_std_cache_.array().exp();
  const double logp_const = -log_std_cache_.sum() - 0.5 * K * kLog2Pi;
  double reward_sum = 0.0;
  double level_sum = 0.0;

  for (int t = 0; t < T; ++t) {
    for (int e = 0; e < N; ++e) {
      if (!all_finite(obs_[static_cast<size_t>(e)].actor) ||
          !all_finite(obs_[static_cast<size_t>(e)].critic)) {
        ++stats.faults;
        reset_env(e, sim::Status::running, nullptr);
      }
      fill_column(obs_a, e, obs_[static_cast<size_t>(e)].actor);
      fill_column(obs_c, e, obs_[static_cast<size_t>(e)].critic);
    }
    net.actor_forward(obs_a, acache);
    net.critic_forward(obs_c, ccache);

    for (int e = 0; e < N; ++e) {
      const int m = t * N + e;
      double sq = 0.0;
      for (int k = 0; k < K; ++k) {
        const double z = streams_[static_cast<size_t>(e)].normal();
        sq += z * z;
        batch.actions(k, m) = acache.tower.out(k, e) + sigma(k) * z;
      }
      batch.logp(m) = -0.5 * sq + logp_const;
      batch.actor_obs.col(m) = obs_a.col(e);
      batch.critic_obs.col(m) = obs_c.col(e);
      batch.values(m) = ccache.tower.out(0, e);
      values_grid(t, e) = ccache.tower.out(0, e);
      level_sum += levels_[static_cast<size_t>(e)];
    }

    pool_.parallel_for(N, [&](int e) {
      const size_t u = static_cast<size_t>(e);
      sim::Environment& env = *envs_[u];
      obs_[u] = env.step(batch.actions.col(t * N + e), &step_data[u]);
      breakdown[u] = rewards::compute_rewards(
          rewards::make_context(cfg_.env.physics, env.profile(), step_data[u]), cfg_.rewards);
    });

    for (int e = 0; e < N; ++e) {
      const rewards::RewardBreakdown& rb = breakdown[static_cast<size_t>(e)];
      rewards_grid(t, e) = rb.total;
      reward_sum += rb.total;
      episode_reward_[static_cast<size_t>(e)] += rb.total;
      for (int i = 0; i < rewards::kNumTerms; ++i) {
        stats.term_raw[static_cast<size_t>(i)] += rb.raw[static_cast<size_t>(i)];
        stats.term_weighted[static_cast<size_t>(i)] += rb.weighted[static_cast<size_t>(i)];
      }
      const sim::Status s = step_data[static_cast<size_t>(e)].status;
      if (s != sim::Status::running) {
        dones(t, e) = true;
        reset_env(e, s, &stats);
      }
    }
  }

  Eigen::VectorXd bootstrap(N);
  for (int e = 0; e < N; ++e) {
    if (!all_finite(obs_[static_cast<size_t>(e)].actor) ||
        !all_finite(obs_[static_cast<size_t>(e)].critic)) {
      ++stats.faults;
      reset_env(e, sim::Status::running, nullptr);
    }
    fill_column(obs_c, e, obs_[static_cast<size_t>(e)].critic);
  }
  net.critic_forward(obs_c, ccache);
  for (int e = 0; e < N; ++e) bootstrap(e) = ccache.tower.out(0, e);

  const GaeResult res = gae(rewards_grid, values_grid, dones, bootstrap, cfg.gamma, cfg.lam);
  for (int t = 0; t < T; ++t)
    for (int e = 0; e < N; ++e) {
      batch.advantages(t * N + e) = res.advantages(t, e);
      batch.returns(t * N + e) = res.returns(t, e);
    }

  stats.mean_reward = reward_sum / M;
  stats.mean_level = level_sum / M;
  stats.success_rate = stats.episodes > 0 ? static_cast<double>(stats.successes) / stats.episodes : 0.0;
  for (int i = 0; i < rewards::kNumTerms; ++i) {
    stats.term_raw[static_cast<size_t>(i)] /= M;
    stats.term_weighted[static_cast<size_t>(i)] /= M;
  }
  return stats;
}

}  // namespace parkour::learn
