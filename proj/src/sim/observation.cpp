#include "sim/observation.hpp"

#include <stdexcept>

namespace parkour::sim {

ObservationAssembler::ObservationAssembler(const ObsConfig& cfg, int n_rays)
    : cfg_(cfg), n_rays_(n_rays) {
  if (cfg.history < 1 || cfg.stride < 1 || cfg.depth_slots < 1)
    throw std::invalid_argument("observation: history/stride/slots must be >= 1");
  const int cap = capacity();
  proprio_actor_.assign(cap, std::vector<float>(kProprioDim, 0.0f));
  proprio_critic_.assign(cap, std::vector<float>(kProprioDim, 0.0f));
  scans_actor_.assign(cap, std::vector<float>(n_rays_, 0.0f));
  scans_critic_.assign(cap, std::vector<float>(n_rays_, 0.0f));
}

int ObservationAssembler::capacity() const {
  return std::max(cfg_.history, (cfg_.depth_slots - 1) * cfg_.stride + 1);
}

int ObservationAssembler::min_history() const { return capacity(); }

int ObservationAssembler::actor_dim() const {
  return cfg_.history * kProprioDim + cfg_.depth_slots * n_rays_;
}

void ObservationAssembler::reset() {
  count_ = 0;
  for (auto& v : proprio_actor_) std::fill(v.begin(), v.end(), 0.0f);
  for (auto& v : proprio_critic_) std::fill(v.begin(), v.end(), 0.0f);
  for (auto& v : scans_actor_) std::fill(v.begin(), v.end(), 0.0f);
  for (auto& v : scans_critic_) std::fill(v.begin(), v.end(), 0.0f);
  lin_vel_[0] = lin_vel_[1] = 0.0f;
}

void ObservationAssembler::push(const ProprioSample& raw, const DepthScan& scan,
                                std::mt19937_64& rng) {
  if (static_cast<int>(scan.size()) != n_rays_)
    throw std::invalid_argument("observation: scan size mismatch");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const NoiseScales& ns = cfg_.noise;
  const ObsScales& sc = cfg_.scales;

  const int slot = count_ % capacity();
  auto& pa = proprio_actor_[slot];
  auto& pc = proprio_critic_[slot];
  int i = 0;
  auto emit = [&](double value, double noise, double scale) {
    pa[i] = static_cast<float>((value + u(rng) * noise) * scale);
    pc[i] = static_cast<float>(value * scale);
    ++i;
  };
  emit(raw.omega, ns.ang_vel, sc.ang_vel);
  emit(raw.sin_theta, ns.gravity, sc.gravity);
  emit(raw.cos_theta, ns.gravity, sc.gravity);
  emit(raw.cmd_vx, ns.cmd, sc.cmd);
  for (int j = 0; j < 4; ++j) emit(raw.q(j), ns.q, sc.q);
  for (int j = 0; j < 4; ++j) emit(raw.qd(j), ns.qd, sc.qd);
  for (int j = 0; j < 4; ++j) emit(raw.a_prev(j), ns.a_prev, sc.a_prev);

  auto& sa = scans_actor_[slot];
  auto& scn = scans_critic_[slot];
  for (int r = 0; r < n_rays_; ++r) {
    sa[r] = static_cast<float>((scan[r] + u(rng) * ns.depth) * sc.depth);
    scn[r] = static_cast<float>(scan[r] * sc.depth);
  }
  lin_vel_[0] = static_cast<float>(raw.xd * sc.lin_vel);
  lin_vel_[1] = static_cast<float>(raw.zd * sc.lin_vel);
  ++count_;
}

Observation ObservationAssembler::assemble() const {
  Observation obs;
  obs.actor.reserve(actor_dim());
  obs.critic.reserve(critic_dim());
  const int cap = capacity();
  const int t = count_ - 1;  // index of the newest pushed sample

  // proprio window p_{t-h+1} … p_t, oldest first; pre-episode slots are zeros
  for (int k = cfg_.history - 1; k >= 0; --k) {
    const int idx = t - k;
    if (idx < 0) {
      obs.actor.insert(obs.actor.end(), kProprioDim, 0.0f);
      obs.critic.insert(obs.critic.end(), kProprioDim, 0.0f);
    } else {
      const auto& pa = proprio_actor_[idx % cap];
      const auto& pc = proprio_critic_[idx % cap];
      obs.actor.insert(obs.actor.end(), pa.begin(), pa.end());
      obs.critic.insert(obs.critic.end(), pc.begin(), pc.end());
    }
  }
  // depth slots newest first: t, t-ℓ, …, t-(m-1)ℓ
  for (int k = 0; k < cfg_.depth_slots; ++k) {
    const int idx = t - k * cfg_.stride;
    if (idx < 0) {
      obs.actor.insert(obs.actor.end(), n_rays_, 0.0f);
      obs.critic.insert(obs.critic.end(), n_rays_, 0.0f);
    } else {
      const auto& sa = scans_actor_[idx % cap];
      const auto& sc = scans_critic_[idx % cap];
      obs.actor.insert(obs.actor.end(), sa.begin(), sa.end());
      obs.critic.insert(obs.critic.end(), sc.begin(), sc.end());
    }
  }
  obs.critic.push_back(lin_vel_[0]);
  obs.critic.push_back(lin_vel_[1]);
  return obs;
}

}  // namespace parkour::sim
