#include "learn/pretrain.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "common/hash.hpp"

namespace parkour::learn {

namespace {

std::uint64_t mix_physics(std::uint64_t h, const sim::PhysicsConfig& p) {
  h = hash_mix(h, p.torso_mass);
  h = hash_mix(h, p.torso_len);
  h = hash_mix(h, p.link_mass);
  h = hash_mix(h, p.link_len);
  h = hash_mix(h, p.gravity);
  h = hash_mix(h, p.kp);
  h = hash_mix(h, p.kd);
  h = hash_mix(h, p.tau_max);
  h = hash_mix(h, p.qdot_max);
  for (double v : p.q_default) h = hash_mix(h, v);
  for (double v : p.q_lo) h = hash_mix(h, v);
  for (double v : p.q_hi) h = hash_mix(h, v);
  h = hash_mix(h, p.contact_k);
  h = hash_mix(h, p.contact_c);
  h = hash_mix(h, p.contact_kt);
  h = hash_mix(h, p.contact_ct);
  h = hash_mix(h, p.friction_mu);
  return h;
}

std::string checkpoint_path(const std::string& dir, int iteration, bool final) {
  char name[64];
  if (final)
    std::snprintf(name, sizeof name, "checkpoint_final.ckpt");
  else
    std::snprintf(name, sizeof name, "checkpoint_%06d.ckpt", iteration);
  return (std::filesystem::path(dir) / name).string();
}

void write_train_row(std::ofstream& os, const TrainRow& r) {
  char line[512];
  std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                r.iteration, r.mean_reward, r.success_rate, r.policy_loss, r.value_loss,
                r.entropy, r.kl, r.clip_fraction, r.mean_level, r.episodes, r.faults);
  os << line;
}

}  // namespace

std::uint64_t env_config_digest(const sim::EnvConfig& cfg) {
  std::uint64_t h = kFnvOffset;
  h = hash_mix(h, cfg.dt);
  h = hash_mix(h, cfg.substeps);
  h = hash_mix(h, cfg.command_vx);
  h = hash_mix(h, cfg.action_scale);
  h = hash_mix(h, cfg.jitter_x);
  h = hash_mix(h, cfg.jitter_pitch);
  h = hash_mix(h, cfg.jitter_q);
  h = mix_physics(h, cfg.physics);
  h = hash_mix(h, cfg.sensor.n_rays);
  h = hash_mix(h, cfg.sensor.angle_lo);
  h = hash_mix(h, cfg.sensor.angle_hi);
  h = hash_mix(h, cfg.sensor.d_min);
  h = hash_mix(h, cfg.sensor.d_max);
  h = hash_mix(h, cfg.obs.history);
  h = hash_mix(h, cfg.obs.stride);
  h = hash_mix(h, cfg.obs.depth_slots);
  h = hash_mix(h, cfg.obs.noise.ang_vel);
  h = hash_mix(h, cfg.obs.noise.gravity);
  h = hash_mix(h, cfg.obs.noise.cmd);
  h = hash_mix(h, cfg.obs.noise.q);
  h = hash_mix(h, cfg.obs.noise.qd);
  h = hash_mix(h, cfg.obs.noise.a_prev);
  h = hash_mix(h, cfg.obs.noise.depth);
  h = hash_mix(h, cfg.obs.scales.ang_vel);
  h = hash_mix(h, cfg.obs.scales.gravity);
  h = hash_mix(h, cfg.obs.scales.cmd);
  h = hash_mix(h, cfg.obs.scales.q);
  h = hash_mix(h, cfg.obs.scales.qd);
  h = hash_mix(h, cfg.obs.scales.a_prev);
  h = hash_mix(h, cfg.obs.scales.depth);
  h = hash_mix(h, cfg.obs.scales.lin_vel);
  h = hash_mix(h, cfg.term.pitch_limit);
  h = hash_mix(h, cfg.term.stuck_window);
  h = hash_mix(h, cfg.term.stuck_min_progress);
  h = hash_mix(h, cfg.term.stuck_x_max);
  h = hash_mix(h, cfg.term.max_time);
  h = hash_mix(h, cfg.term.contact_tol);
  return h;
}

std::uint64_t PretrainConfig::digest(const nn::NetConfig& net) const {
  std::uint64_t h = kFnvOffset;
  h = hash_mix(h, ppo.digest());
  h = hash_mix(h, runner.rewards.digest());
  h = hash_mix(h, net.digest());
  h = hash_mix(h, env_config_digest(runner.env));
  h = hash_mix(h, runner.command_lo);
  h = hash_mix(h, runner.command_hi);
  h = hash_mix(h, iterations);
  return h;
}

TrainState pretrain(const procgen::CurriculumGrid& grid, const nn::NetConfig& net_cfg,
                    const PretrainConfig& cfg, std::uint64_t seed) {
  if (cfg.iterations < 0) throw std::invalid_argument("pretrain: negative iteration budget");
  cfg.ppo.check();

  TrainState state{nn::ActorCritic::build(net_cfg, derive_seed(seed, 0x696e6974ULL)), 0, false, {}};
  VecRunner runner(&grid, cfg.runner, cfg.ppo.n_envs, derive_seed(seed, 0x656e7673ULL));
  Adam opt(state.net.params().size());
  const std::vector<std::uint8_t> mask = state.net.params().mask_all();
  const std::uint64_t config_digest = cfg.digest(net_cfg);

  std::ofstream train_log, reward_log;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    train_log.open((std::filesystem::path(cfg.out_dir) / "train_log.csv").string());
    train_log << "iteration,mean_reward,success_rate,policy_loss,value_loss,entropy,kl,"
                 "clip_fraction,mean_level,episodes,faults\n";
    if (cfg.reward_log_every > 0) {
      reward_log.open((std::filesystem::path(cfg.out_dir) / "reward_terms.csv").string());
      reward_log << "iteration,term,mean_raw,mean_weighted\n";
    }
  }
  const auto checkpoint = [&](int iteration, bool final) {
    nn::CheckpointMeta meta;
    meta.iteration = static_cast<std::uint64_t>(iteration);
    meta.seed = seed;
    meta.config_digest = config_digest;
    meta.strategy = 0;
    nn::save_checkpoint(checkpoint_path(cfg.out_dir, iteration, final), state.net, meta);
  };

  RolloutBatch batch;
  state.history.reserve(static_cast<size_t>(cfg.iterations));
  for (int it = 1; it <= cfg.iterations; ++it) {
    const IterStats roll = runner.collect(state.net, cfg.ppo, batch);
    const PPOStats ppo = ppo_update(state.net, batch, cfg.ppo, opt, mask,
                                    derive_seed(seed, 0x75706474ULL + static_cast<std::uint64_t>(it)));
    TrainRow row;
    row.iteration = it;
    row.mean_reward = roll.mean_reward;
    row.success_rate = roll.success_rate;
    row.policy_loss = ppo.policy_loss;
    row.value_loss = ppo.value_loss;
    row.entropy = ppo.entropy;
    row.kl = ppo.kl;
    row.clip_fraction = ppo.clip_fraction;
    row.mean_level = roll.mean_level;
    row.episodes = roll.episodes;
    row.faults = roll.faults + (ppo.fault ? 1 : 0);
    state.history.push_back(row);
    state.iterations_run = it;
    if (ppo.fault) state.fault = true;

    if (train_log.is_open()) write_train_row(train_log, row);
    if (reward_log.is_open() && cfg.reward_log_every > 0 &&
        (it % cfg.reward_log_every == 0 || it == cfg.iterations)) {
      char line[256];
      for (int i = 0; i < rewards::kNumTerms; ++i) {
        std::snprintf(line, sizeof line, "%d,%s,%.17g,%.17g\n", it,
                      rewards::term_name(static_cast<rewards::Term>(i)),
                      roll.term_raw[static_cast<size_t>(i)],
                      roll.term_weighted[static_cast<size_t>(i)]);
        reward_log << line;
      }
    }
    if (!cfg.out_dir.empty() && cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0)
      checkpoint(it, false);
  }
  if (!cfg.out_dir.empty()) checkpoint(state.iterations_run, true);
  return state;
}

double evaluate(const nn::ActorCritic& net, const sim::TerrainProfile& profile,
                const sim::EnvConfig& env_cfg, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("evaluate: n_trials must be >= 1");
  const sim::PolicyFn policy = [&net](const sim::Observation& o) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(o.actor.size()));
    for (size_t k = 0; k < o.actor.size(); ++k)
      x(static_cast<Eigen::Index>(k)) = static_cast<double>(o.actor[k]);
    return sim::Vec4(net.act_mean(x));
  };
  int successes = 0;
  for (int i = 0; i < n_trials; ++i) {
    const auto [traj, status] =
        sim::run_episode(policy, profile, env_cfg, derive_seed(seed, static_cast<std::uint64_t>(i)));
    (void)traj;
    if (status == sim::Status::success) ++successes;
  }
  return static_cast<double>(successes) / n_trials;
}

}  // namespace parkour::learn
