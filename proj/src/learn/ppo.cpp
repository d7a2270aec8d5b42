#include "learn/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "common/hash.hpp"
#include "common/rng.hpp"

namespace parkour::learn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

bool all_finite(const std::vector<double>& v) {
  for (const double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void PPOConfig::check() const {
  if (!(clip > 0.0 && clip < 1.0)) throw std::invalid_argument("ppo: clip must be in (0,1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo: gamma must be in (0,1]");
  if (!(lam > 0.0 && lam <= 1.0)) throw std::invalid_argument("ppo: lam must be in (0,1]");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("ppo: bad learning rate");
  if (epochs < 1 || minibatches < 1 || horizon < 1 || n_envs < 1)
    throw std::invalid_argument("ppo: counts must be positive");
  if (!(entropy_coef >= 0.0) || !(value_coef >= 0.0) || !(max_grad_norm > 0.0))
    throw std::invalid_argument("ppo: bad coefficients");
}

std::uint64_t PPOConfig::digest() const {
  std::uint64_t h = kFnvOffset;
  h = hash_mix(h, clip);
  h = hash_mix(h, gamma);
  h = hash_mix(h, lam);
  h = hash_mix(h, lr);
  h = hash_mix(h, epochs);
  h = hash_mix(h, minibatches);
  h = hash_mix(h, horizon);
  h = hash_mix(h, n_envs);
  h = hash_mix(h, entropy_coef);
  h = hash_mix(h, value_coef);
  h = hash_mix(h, max_grad_norm);
  return h;
}

void normalize_advantages(Eigen::VectorXd& adv) {
  const Eigen::Index m = adv.size();
  if (m == 0) return;
  adv.array() -= adv.mean();
  if (m > 1) {
    const double stddev = std::sqrt(adv.squaredNorm() / static_cast<double>(m));
    if (stddev > 1e-12) adv /= stddev;
  }
}

LossReport ppo_loss_grad(const nn::ActorCritic& net, const RolloutBatch& batch,
                         const std::vector<int>& idx, const PPOConfig& cfg,
                         std::vector<double>* grad) {
  const int m = static_cast<int>(idx.size());
  if (m == 0) throw std::invalid_argument("ppo: empty minibatch");
  const int K = net.config().action_dim;

  nn::Mat actor_obs(batch.actor_obs.rows(), m);
  nn::Mat critic_obs(batch.critic_obs.rows(), m);
  nn::Mat actions(K, m);
  Eigen::VectorXd adv(m), ret(m), logp_old(m);
  for (int j = 0; j < m; ++j) {
    const int col = idx[j];
    actor_obs.col(j) = batch.actor_obs.col(col);
    critic_obs.col(j) = batch.critic_obs.col(col);
    actions.col(j) = batch.actions.col(col);
    adv[j] = batch.advantages[col];
    ret[j] = batch.returns[col];
    logp_old[j] = batch.logp[col];
  }

  nn::ActorCache ac;
  net.actor_forward(actor_obs, ac);
  const nn::Mat& mean = ac.tower.out;
  nn::CriticCache cc;
  net.critic_forward(critic_obs, cc);
  const nn::Mat& value = cc.tower.out;  // 1 x m

  const Eigen::VectorXd log_std = net.log_std();
  const Eigen::VectorXd sigma = log_std.array().exp();
  const double entropy =
      log_std.sum() + 0.5 * K * (kLog2Pi + 1.0);  // per-sample, state-independent

  // z = (a - mu) / sigma, column-wise
  nn::Mat z = actions - mean;
  for (int i = 0; i < K; ++i) z.row(i) /= sigma[i];

  LossReport rep;
  rep.entropy = entropy;
  const double inv_m = 1.0 / m;
  nn::Mat dmean;
  nn::Mat dvalue;
  Eigen::VectorXd dlog_std;
  if (grad) {
    dmean = nn::Mat::Zero(K, m);
    dvalue = nn::Mat::Zero(1, m);
    dlog_std = Eigen::VectorXd::Constant(K, -cfg.entropy_coef);
  }

  for (int j = 0; j < m; ++j) {
    const double logp_new =
        -0.5 * z.col(j).squaredNorm() - log_std.sum() - 0.5 * K * kLog2Pi;
    const double log_ratio = logp_new - logp_old[j];
    const double ratio = std::exp(log_ratio);
    const double a = adv[j];

    const bool clipped_out = (a >= 0.0 && ratio > 1.0 + cfg.clip) ||
                             (a < 0.0 && ratio < 1.0 - cfg.clip);
    const double surr_unclipped = ratio * a;
    const double surr_clipped =
        std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * a;
    rep.policy += -std::min(surr_unclipped, surr_clipped) * inv_m;
    rep.kl += (ratio - 1.0 - log_ratio) * inv_m;
    if (std::abs(ratio - 1.0) > cfg.clip) rep.clip_fraction += inv_m;

    const double verr = value(0, j) - ret[j];
    rep.value += 0.5 * verr * verr * inv_m;

    if (grad) {
      const double dlogp = clipped_out ? 0.0 : -a * ratio * inv_m;
      dmean.col(j) = dlogp * (z.col(j).array() / sigma.array()).matrix();
      dlog_std.array() += dlogp * (z.col(j).array().square() - 1.0);
      dvalue(0, j) = cfg.value_coef * verr * inv_m;
    }
  }
  rep.total = rep.policy + cfg.value_coef * rep.value - cfg.entropy_coef * rep.entropy;

  if (grad) {
    net.actor_backward(ac, dmean, *grad);
    net.critic_backward(cc, dvalue, *grad);
    const std::size_t off = net.log_std_offset();
    for (int i = 0; i < K; ++i) (*grad)[off + i] += dlog_std[i];
  }
  return rep;
}

PPOStats ppo_update(nn::ActorCritic& net, RolloutBatch& batch, const PPOConfig& cfg, Adam& opt,
                    const std::vector<std::uint8_t>& mask, std::uint64_t seed) {
  cfg.check();
  const int M = batch.size();
  if (M == 0) throw std::invalid_argument("ppo_update: empty batch");
  if (batch.actor_obs.cols() != M || batch.critic_obs.cols() != M ||
      batch.actions.cols() != M || batch.advantages.size() != M || batch.returns.size() != M)
    throw std::invalid_argument("ppo_update: misaligned batch");
  if (mask.size() != net.params().size())
    throw std::invalid_argument("ppo_update: mask size mismatch");

  normalize_advantages(batch.advantages);

  const std::vector<double> entry = net.params().values();
  std::vector<double> grad(net.params().size());
  std::vector<int> order(M);
  for (int i = 0; i < M; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x70706f5353ULL));

  PPOStats stats;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = M - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    for (int b = 0; b < cfg.minibatches; ++b) {
      const int lo = static_cast<int>(static_cast<long long>(M) * b / cfg.minibatches);
      const int hi = static_cast<int>(static_cast<long long>(M) * (b + 1) / cfg.minibatches);
      if (hi <= lo) continue;
      const std::vector<int> idx(order.begin() + lo, order.begin() + hi);

      grad.assign(grad.size(), 0.0);
      const LossReport rep = ppo_loss_grad(net, batch, idx, cfg, &grad);
      if (!std::isfinite(rep.total) || !all_finite(grad)) {
        net.params().values() = entry;
        stats.fault = true;
        return stats;
      }
      stats.grad_norm += clip_grad_norm(grad, mask, cfg.max_grad_norm);
      opt.step(net.params().values(), grad, mask, cfg.lr);

      stats.policy_loss += rep.policy;
      stats.value_loss += rep.value;
      stats.entropy += rep.entropy;
      stats.kl += rep.kl;
      stats.clip_fraction += rep.clip_fraction;
      ++stats.updates;
    }
  }
  if (stats.updates > 0) {
    const double inv = 1.0 / stats.updates;
    stats.policy_loss *= inv;
    stats.value_loss *= inv;
    stats.entropy *= inv;
    stats.kl *= inv;
    stats.clip_fraction *= inv;
    stats.grad_norm *= inv;
  }
  return stats;
}

}  // namespace parkour::learn
