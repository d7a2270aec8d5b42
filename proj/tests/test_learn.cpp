#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "learn/gae.hpp"
#include "learn/pretrain.hpp"
#include "learn/ppo.hpp"
#include "learn/rollout.hpp"

using namespace parkour;
using namespace parkour::learn;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

nn::NetConfig tiny_net() {
  nn::NetConfig cfg;
  cfg.proprio_dim = 3;
  cfg.proprio_hist = 2;
  cfg.n_rays = 9;
  cfg.depth_slots = 2;
  cfg.priv_dim = 2;
  cfg.conv1_out = 2;
  cfg.conv1_k = 3;
  cfg.conv1_stride = 2;
  cfg.conv2_out = 2;
  cfg.conv2_k = 2;
  cfg.conv2_stride = 2;
  cfg.trunk = {8, 6};
  cfg.action_dim = 3;
  return cfg;
}

// Environment observation dims with a small trunk, to keep rollouts cheap.
nn::NetConfig env_net() {
  nn::NetConfig cfg;
  cfg.trunk = {16, 8};
  return cfg;
}

nn::Mat random_mat(Rng& rng, int rows, int cols, double scale = 0.5) {
  nn::Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

// Batch drawn from the net's own policy. Ratios start at exp(±jitter), so a
// small jitter keeps every sample strictly inside the clip band.
RolloutBatch self_batch(const nn::ActorCritic& net, int m, std::uint64_t seed,
                        double logp_jitter) {
  Rng rng(seed);
  const int K = net.config().action_dim;
  RolloutBatch b;
  b.actor_obs = random_mat(rng, net.config().actor_obs_dim(), m);
  b.critic_obs.resize(net.config().critic_obs_dim(), m);
  b.critic_obs.topRows(net.config().actor_obs_dim()) = b.actor_obs;
  b.critic_obs.bottomRows(net.config().priv_dim) = random_mat(rng, net.config().priv_dim, m);

  nn::ActorCache ac;
  net.actor_forward(b.actor_obs, ac);
  const Eigen::VectorXd log_std = net.log_std();
  const Eigen::VectorXd sigma = log_std.array().exp();

  b.actions.resize(K, m);
  b.logp.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  b.values.resize(m);
  for (int j = 0; j < m; ++j) {
    double sq = 0.0;
    for (int k = 0; k < K; ++k) {
      const double z = rng.normal();
      sq += z * z;
      b.actions(k, j) = ac.tower.out(k, j) + sigma[k] * z;
    }
    b.logp[j] = -0.5 * sq - log_std.sum() - 0.5 * K * kLog2Pi +
                rng.uniform(-logp_jitter, logp_jitter);
    b.advantages[j] = rng.uniform(-1.0, 1.0);
    b.returns[j] = rng.uniform(-1.0, 1.0);
    b.values[j] = 0.0;
  }
  return b;
}

std::vector<int> all_indices(int m) {
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  return idx;
}

PPOConfig small_ppo() {
  PPOConfig cfg;
  cfg.horizon = 8;
  cfg.n_envs = 4;
  cfg.epochs = 2;
  cfg.minibatches = 2;
  return cfg;
}

std::string temp_dir(const char* leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("gae: single transition with zero value gives advantage 1") {
  const auto [adv, ret] = gae(std::vector<double>{1.0}, {0.0}, {false}, 0.0, 0.99, 0.95);
  CHECK(adv.size() == 1);
  CHECK(adv[0] == 1.0);
  CHECK(ret[0] == 1.0);
}

TEST_CASE("gae: three-step discounted sums at lambda 1") {
  const auto [adv, ret] =
      gae(std::vector<double>{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {false, false, false}, 0.0, 0.5, 1.0);
  CHECK(adv[0] == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(adv[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(adv[2] == doctest::Approx(1.0).epsilon(1e-12));
  for (int t = 0; t < 3; ++t) CHECK(ret[t] == adv[t]);
}

TEST_CASE("gae: nothing bootstraps across a terminal step") {
  const std::vector<double> r{1.0, 1.0, 1.0}, v{0.5, 0.5, 0.5};
  const std::vector<bool> d{false, true, false};
  const auto [adv_a, ret_a] = gae(r, v, d, 9.0, 0.5, 0.9);
  const auto [adv_b, ret_b] = gae(r, v, d, 0.0, 0.5, 0.9);
  // the terminal at t=1 cuts the recursion: steps 0..1 ignore the bootstrap
  CHECK(adv_a[0] == adv_b[0]);
  CHECK(adv_a[1] == adv_b[1]);
  CHECK(adv_a[2] != adv_b[2]);
  CHECK(adv_a[1] == doctest::Approx(0.5).epsilon(1e-12));  // r - v, no successor
  CHECK(ret_a[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gae: matrix and vector paths agree; returns = advantages + values") {
  Rng rng(7);
  const int T = 7, N = 3;
  Eigen::MatrixXd r(T, N), v(T, N);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> d(T, N);
  Eigen::VectorXd boot(N);
  for (int e = 0; e < N; ++e) {
    boot(e) = rng.normal();
    for (int t = 0; t < T; ++t) {
      r(t, e) = rng.normal();
      v(t, e) = rng.normal();
      d(t, e) = rng.uniform() < 0.25;
    }
  }
  const GaeResult res = gae(r, v, d, boot, 0.97, 0.9);
  for (int e = 0; e < N; ++e) {
    std::vector<double> re(T), ve(T);
    std::vector<bool> de(T);
    for (int t = 0; t < T; ++t) {
      re[t] = r(t, e);
      ve[t] = v(t, e);
      de[t] = d(t, e);
    }
    const auto [adv, ret] = gae(re, ve, de, boot(e), 0.97, 0.9);
    for (int t = 0; t < T; ++t) {
      CHECK(res.advantages(t, e) == adv[t]);
      CHECK(res.returns(t, e) == ret[t]);
      CHECK(res.returns(t, e) == res.advantages(t, e) + v(t, e));
    }
  }
  CHECK_THROWS(gae(r, v, d, Eigen::VectorXd::Zero(N + 1), 0.97, 0.9));
  CHECK_THROWS(gae(std::vector<double>{1.0, 2.0}, {0.0}, {false}, 0.0, 0.99, 0.95));
}

TEST_CASE("advantage normalization: zero mean, unit std, degenerate batches centered") {
  Rng rng(11);
  Eigen::VectorXd adv(256);
  for (int i = 0; i < adv.size(); ++i) adv(i) = 3.0 + 2.0 * rng.normal();
  normalize_advantages(adv);
  CHECK(std::abs(adv.mean()) <= 1e-9);
  CHECK(std::abs(std::sqrt(adv.squaredNorm() / adv.size()) - 1.0) <= 1e-6);

  Eigen::VectorXd one(1);
  one << 42.0;
  normalize_advantages(one);
  CHECK(one(0) == 0.0);

  Eigen::VectorXd flat_adv = Eigen::VectorXd::Constant(8, 5.0);
  normalize_advantages(flat_adv);
  for (int i = 0; i < 8; ++i) CHECK(flat_adv(i) == 0.0);
}

TEST_CASE("adam: masked scalars and their moments are never touched") {
  std::vector<double> params{1.0, 2.0, 3.0, 4.0};
  const std::vector<std::uint8_t> mask{1, 0, 1, 0};
  Adam opt(4);
  for (int it = 0; it < 5; ++it) {
    std::vector<double> grad{0.3, -0.7, 1.1, 0.9};
    opt.step(params, grad, mask, 0.05);
  }
  CHECK(params[1] == 2.0);
  CHECK(params[3] == 4.0);
  CHECK(params[0] != 1.0);
  CHECK(params[2] != 3.0);
}

TEST_CASE("adam: learning rate 0 is a bitwise no-op") {
  std::vector<double> params{-0.0, 1.5, -2.25e-8};
  const std::vector<double> before = params;
  std::vector<double> grad{10.0, -3.0, 0.5};
  Adam opt(3);
  opt.step(params, grad, {1, 1, 1}, 0.0);
  CHECK(std::memcmp(params.data(), before.data(), params.size() * sizeof(double)) == 0);
}

TEST_CASE("adam: drives a quadratic to its minimum") {
  std::vector<double> params{8.0};
  Adam opt(1);
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> grad{2.0 * (params[0] - 3.0)};
    opt.step(params, grad, {1}, 0.02);
  }
  CHECK(params[0] == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("gradient clipping: scales only above the limit, only inside the mask") {
  std::vector<double> g{3.0, 4.0};
  CHECK(clip_grad_norm(g, {1, 1}, 1.0) == 5.0);
  CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> below{0.3, 0.4};
  const std::vector<double> before = below;
  CHECK(clip_grad_norm(below, {1, 1}, 1.0) == 0.5);
  CHECK(std::memcmp(below.data(), before.data(), 2 * sizeof(double)) == 0);

  std::vector<double> part{3.0, 4.0};
  CHECK(clip_grad_norm(part, {1, 0}, 1.0) == 3.0);
  CHECK(part[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(part[1] == 4.0);
}

TEST_CASE("ppo loss gradient matches central finite differences") {
  auto net = nn::ActorCritic::build(tiny_net(), 91);
  RolloutBatch batch = self_batch(net, 12, 17, 0.05);
  normalize_advantages(batch.advantages);
  const std::vector<int> idx = all_indices(12);
  PPOConfig cfg;

  std::vector<double> grad(net.params().size(), 0.0);
  ppo_loss_grad(net, batch, idx, cfg, &grad);

  // all log-std entries plus a deterministic sample of the rest
  std::vector<std::size_t> probe;
  for (int k = 0; k < net.config().action_dim; ++k) probe.push_back(net.log_std_offset() + k);
  Rng pick(5);
  for (int s = 0; s < 60; ++s)
    probe.push_back(static_cast<std::size_t>(pick.uniform_index(net.params().size())));

  std::vector<double>& theta = net.params().values();
  for (const std::size_t i : probe) {
    const double x0 = theta[i];
    const double h = 1e-5 * std::max(1.0, std::abs(x0));
    theta[i] = x0 + h;
    const double fp = ppo_loss_grad(net, batch, idx, cfg, nullptr).total;
    theta[i] = x0 - h;
    const double fm = ppo_loss_grad(net, batch, idx, cfg, nullptr).total;
    theta[i] = x0;
    const double fd = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    INFO("param index " << i << " fd " << fd << " analytic " << grad[i]);
    CHECK(std::abs(grad[i] - fd) / denom <= 1e-3);
  }
}

TEST_CASE("ppo: in-band ratios make the clip setting irrelevant") {
  auto net = nn::ActorCritic::build(tiny_net(), 23);
  RolloutBatch batch = self_batch(net, 16, 29, 0.05);
  const std::vector<int> idx = all_indices(16);

  PPOConfig narrow;
  narrow.clip = 0.2;
  PPOConfig wide = narrow;
  wide.clip = 0.9;

  std::vector<double> g_narrow(net.params().size(), 0.0), g_wide(g_narrow);
  const LossReport a = ppo_loss_grad(net, batch, idx, narrow, &g_narrow);
  const LossReport b = ppo_loss_grad(net, batch, idx, wide, &g_wide);
  CHECK(a.clip_fraction == 0.0);
  CHECK(b.clip_fraction == 0.0);
  CHECK(std::memcmp(g_narrow.data(), g_wide.data(), g_narrow.size() * sizeof(double)) == 0);
}

TEST_CASE("ppo: actor gradient ignores privileged critic-only inputs") {
  auto net = nn::ActorCritic::build(tiny_net(), 47);
  RolloutBatch batch = self_batch(net, 10, 53, 0.03);
  const std::vector<int> idx = all_indices(10);
  PPOConfig cfg;

  std::vector<double> g1(net.params().size(), 0.0), g2(g1);
  ppo_loss_grad(net, batch, idx, cfg, &g1);

  Rng rng(99);
  batch.critic_obs.bottomRows(net.config().priv_dim) =
      random_mat(rng, net.config().priv_dim, 10, 2.0);
  ppo_loss_grad(net, batch, idx, cfg, &g2);

  bool critic_changed = false;
  for (const auto& e : net.params().entries()) {
    const bool actor_side = e.name.rfind("actor", 0) == 0 || e.name == "log_std";
    for (std::size_t i = e.offset; i < e.offset + e.size; ++i) {
      if (actor_side)
        CHECK(g1[i] == g2[i]);
      else if (g1[i] != g2[i])
        critic_changed = true;
    }
  }
  CHECK(critic_changed);
}

TEST_CASE("ppo update: learning rate 0 leaves the checksum unchanged") {
  auto net = nn::ActorCritic::build(tiny_net(), 3);
  RolloutBatch batch = self_batch(net, 24, 71, 0.05);
  PPOConfig cfg = small_ppo();
  cfg.lr = 0.0;

  const std::uint64_t before = net.params().checksum();
  Adam opt(net.params().size());
  const PPOStats stats = ppo_update(net, batch, cfg, opt, net.params().mask_all(), 5);
  CHECK(net.params().checksum() == before);
  CHECK_FALSE(stats.fault);
  CHECK(stats.updates == cfg.epochs * cfg.minibatches);
  CHECK(std::isfinite(stats.kl));
  CHECK(std::isfinite(stats.grad_norm));
}

TEST_CASE("ppo update: a non-finite batch aborts and restores entry parameters") {
  auto net = nn::ActorCritic::build(tiny_net(), 3);
  RolloutBatch batch = self_batch(net, 24, 71, 0.05);
  batch.returns[3] = std::numeric_limits<double>::quiet_NaN();
  PPOConfig cfg = small_ppo();

  const std::uint64_t before = net.params().checksum();
  Adam opt(net.params().size());
  const PPOStats stats = ppo_update(net, batch, cfg, opt, net.params().mask_all(), 5);
  CHECK(stats.fault);
  CHECK(net.params().checksum() == before);
}

TEST_CASE("rollout: batch shape, finiteness, and bitwise determinism") {
  const auto grid = procgen::flat_grid(2, 3);
  const auto net = nn::ActorCritic::build(env_net(), 101);
  const PPOConfig ppo = small_ppo();
  RunnerConfig rc;

  VecRunner r1(&grid, rc, ppo.n_envs, 2024);
  RolloutBatch b1;
  const IterStats s1 = r1.collect(net, ppo, b1);

  const int M = ppo.horizon * ppo.n_envs;
  CHECK(b1.size() == M);
  CHECK(b1.actor_obs.rows() == net.config().actor_obs_dim());
  CHECK(b1.critic_obs.rows() == net.config().critic_obs_dim());
  CHECK(b1.actions.rows() == 4);
  CHECK(b1.actor_obs.allFinite());
  CHECK(b1.critic_obs.allFinite());
  CHECK(b1.actions.allFinite());
  CHECK(b1.logp.allFinite());
  CHECK(b1.advantages.allFinite());
  CHECK(b1.returns.allFinite());
  CHECK(s1.faults == 0);
  CHECK(s1.mean_level == 0.0);  // first horizon starts at row 0 everywhere

  VecRunner r2(&grid, rc, ppo.n_envs, 2024);
  RolloutBatch b2;
  r2.collect(net, ppo, b2);
  CHECK(b1.actions == b2.actions);
  CHECK(b1.logp == b2.logp);
  CHECK(b1.advantages == b2.advantages);
  CHECK(b1.actor_obs == b2.actor_obs);

  // a second horizon from the same runner continues the streams: different draws
  RolloutBatch b3;
  r1.collect(net, ppo, b3);
  CHECK(b3.actions != b2.actions);
}

TEST_CASE("rollout: thread count does not change the result") {
  const auto grid = procgen::flat_grid(2, 3);
  const auto net = nn::ActorCritic::build(env_net(), 101);
  const PPOConfig ppo = small_ppo();

  RunnerConfig serial;
  RunnerConfig threaded;
  threaded.threads = 3;

  VecRunner r1(&grid, serial, ppo.n_envs, 7);
  VecRunner r2(&grid, threaded, ppo.n_envs, 7);
  RolloutBatch b1, b2;
  const IterStats s1 = r1.collect(net, ppo, b1);
  const IterStats s2 = r2.collect(net, ppo, b2);
  CHECK(b1.actions == b2.actions);
  CHECK(b1.critic_obs == b2.critic_obs);
  CHECK(b1.advantages == b2.advantages);
  CHECK(b1.returns == b2.returns);
  CHECK(s1.mean_reward == s2.mean_reward);
  CHECK(s1.episodes == s2.episodes);
}

TEST_CASE("pretrain: zero iterations returns the initialization") {
  const auto grid = procgen::flat_grid(2, 2);
  PretrainConfig cfg;
  cfg.ppo = small_ppo();
  cfg.iterations = 0;

  const TrainState zero = pretrain(grid, env_net(), cfg, 321);
  CHECK(zero.iterations_run == 0);
  CHECK(zero.history.empty());
  CHECK_FALSE(zero.fault);

  // one iteration at learning rate 0 must land on the same parameters
  PretrainConfig noop = cfg;
  noop.iterations = 1;
  noop.ppo.lr = 0.0;
  const TrainState still = pretrain(grid, env_net(), noop, 321);
  CHECK(still.iterations_run == 1);
  CHECK(still.net.params().checksum() == zero.net.params().checksum());
}

TEST_CASE("pretrain: same seed gives identical checkpoints, any thread count") {
  const auto grid = procgen::flat_grid(2, 2);
  PretrainConfig cfg;
  cfg.ppo = small_ppo();
  cfg.iterations = 2;

  const TrainState a = pretrain(grid, env_net(), cfg, 1234);
  const TrainState b = pretrain(grid, env_net(), cfg, 1234);
  CHECK(a.net.params().checksum() == b.net.params().checksum());
  REQUIRE(a.history.size() == 2);
  REQUIRE(b.history.size() == 2);
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].mean_reward == b.history[i].mean_reward);
    CHECK(a.history[i].policy_loss == b.history[i].policy_loss);
    CHECK(a.history[i].kl == b.history[i].kl);
    CHECK(a.history[i].episodes == b.history[i].episodes);
  }

  PretrainConfig threaded = cfg;
  threaded.runner.threads = 2;
  const TrainState c = pretrain(grid, env_net(), threaded, 1234);
  CHECK(c.net.params().checksum() == a.net.params().checksum());

  const TrainState other = pretrain(grid, env_net(), cfg, 1235);
  CHECK(other.net.params().checksum() != a.net.params().checksum());
}

TEST_CASE("pretrain: training log, reward log, and checkpoints land in out_dir") {
  const auto grid = procgen::flat_grid(2, 2);
  PretrainConfig cfg;
  cfg.ppo = small_ppo();
  cfg.iterations = 2;
  cfg.checkpoint_every = 1;
  cfg.reward_log_every = 1;
  cfg.out_dir = temp_dir("parkour_pretrain_out");

  const TrainState state = pretrain(grid, env_net(), cfg, 77);
  CHECK(state.iterations_run == 2);

  std::ifstream log(std::filesystem::path(cfg.out_dir) / "train_log.csv");
  REQUIRE(log.good());
  std::string line;
  std::getline(log, line);
  CHECK(line ==
        "iteration,mean_reward,success_rate,policy_loss,value_loss,entropy,kl,"
        "clip_fraction,mean_level,episodes,faults");
  int rows = 0;
  while (std::getline(log, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  std::ifstream terms(std::filesystem::path(cfg.out_dir) / "reward_terms.csv");
  REQUIRE(terms.good());
  std::getline(terms, line);
  CHECK(line == "iteration,term,mean_raw,mean_weighted");
  int term_rows = 0;
  while (std::getline(terms, line))
    if (!line.empty()) ++term_rows;
  CHECK(term_rows == 2 * rewards::kNumTerms);

  CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "checkpoint_000001.ckpt"));
  CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "checkpoint_000002.ckpt"));

  auto reload = nn::ActorCritic::build(env_net(), 0);
  const nn::CheckpointMeta meta = nn::load_checkpoint(
      (std::filesystem::path(cfg.out_dir) / "checkpoint_final.ckpt").string(), reload);
  CHECK(meta.iteration == 2);
  CHECK(meta.seed == 77);
  CHECK(meta.strategy == 0);
  // float32 storage: reloaded params match to float precision
  const auto& got = reload.params().values();
  const auto& want = state.net.params().values();
  for (size_t i = 0; i < want.size(); ++i)
    CHECK(got[i] == static_cast<double>(static_cast<float>(want[i])));
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("evaluate: goal behind the spawn makes every trial a success") {
  sim::TerrainProfile prof = sim::TerrainProfile::flat(-1.0, 5.0, 0.0);
  prof.goal_x = -0.5;
  prof.end_min_x = -0.9;
  const auto net = nn::ActorCritic::build(env_net(), 11);
  CHECK(evaluate(net, prof, sim::EnvConfig{}, 5, 42) == 1.0);
}

TEST_CASE("evaluate: an impassable gap never succeeds") {
  sim::TerrainProfile prof = sim::TerrainProfile::flat(-1.0, 6.0, 0.0);
  for (int i = 0; i < prof.size(); ++i) {
    const double x = prof.x0 + i * prof.dx;
    if (x > 0.5 && x < 4.5) {
      prof.samples[static_cast<size_t>(i)] = -10.0;
      prof.ground_mask[static_cast<size_t>(i)] = true;  // pit floor is lethal
    }
  }
  prof.goal_x = 4.8;
  prof.end_min_x = 4.5;
  const auto net = nn::ActorCritic::build(env_net(), 11);
  CHECK(evaluate(net, prof, sim::EnvConfig{}, 3, 42) == 0.0);
}

TEST_CASE("evaluate: deterministic for a fixed seed, rejects empty trials") {
  sim::TerrainProfile prof = sim::TerrainProfile::flat(-1.0, 5.0, 0.0);
  prof.goal_x = -0.5;
  prof.end_min_x = -0.9;
  const auto net = nn::ActorCritic::build(env_net(), 13);
  const double a = evaluate(net, prof, sim::EnvConfig{}, 4, 9);
  const double b = evaluate(net, prof, sim::EnvConfig{}, 4, 9);
  CHECK(a == b);
  CHECK_THROWS(evaluate(net, prof, sim::EnvConfig{}, 0, 9));
}
