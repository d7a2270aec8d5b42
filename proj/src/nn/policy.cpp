#include "nn/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "common/hash.hpp"

namespace parkour::nn {

namespace {

ActorCritic::Tower make_tower(FlatParams& p, const NetConfig& cfg,
                              const std::string& pre, int out_dim, int priv) {
  ActorCritic::Tower t;
  t.priv = priv;
  t.conv1 = Conv1dSpec::create(p, pre + ".enc.conv1", 1, cfg.n_rays, cfg.conv1_out,
                               cfg.conv1_k, cfg.conv1_stride);
  if (cfg.adapters)
    t.ad1 = AdapterSpec::create(p, pre + ".enc.conv1.adapter",
                                cfg.conv1_out * t.conv1.len_out(), cfg.adapter_width);
  t.conv2 = Conv1dSpec::create(p, pre + ".enc.conv2", cfg.conv1_out,
                               t.conv1.len_out(), cfg.conv2_out, cfg.conv2_k,
                               cfg.conv2_stride);
  if (cfg.adapters)
    t.ad2 = AdapterSpec::create(p, pre + ".enc.conv2.adapter",
                                cfg.conv2_out * t.conv2.len_out(), cfg.adapter_width);
  const int latent = cfg.depth_slots * cfg.conv2_out * t.conv2.len_out();
  int in = cfg.proprio_rows() + latent + priv;
  for (std::size_t i = 0; i < cfg.trunk.size(); ++i) {
    const std::string name = pre + ".trunk" + std::to_string(i + 1);
    t.trunk.push_back(DenseSpec::create(p, name, in, cfg.trunk[i]));
    if (cfg.adapters)
      t.trunk_ad.push_back(
          AdapterSpec::create(p, name + ".adapter", cfg.trunk[i], cfg.adapter_width));
    in = cfg.trunk[i];
  }
  t.head = DenseSpec::create(p, pre + ".head", in, out_dim);
  return t;
}

void init_tower(FlatParams& p, const ActorCritic::Tower& t, Rng& rng, double gain,
                double head_gain) {
  init_conv(p, t.conv1, rng, gain);
  init_conv(p, t.conv2, rng, gain);
  // adapter up-projections stay zero: a fresh adapter is the identity
  if (!t.trunk_ad.empty() || t.ad1.down.in > 0) {
    if (t.ad1.down.in > 0) init_dense(p, t.ad1.down, rng, 1.0);
    if (t.ad2.down.in > 0) init_dense(p, t.ad2.down, rng, 1.0);
  }
  for (const auto& ad : t.trunk_ad) init_dense(p, ad.down, rng, 1.0);
  for (const auto& d : t.trunk) init_dense(p, d, rng, gain);
  init_dense(p, t.head, rng, head_gain);
}

}  // namespace

std::uint64_t NetConfig::digest() const {
  std::uint64_t h = kFnvOffset;
  h = hash_mix(h, proprio_dim);
  h = hash_mix(h, proprio_hist);
  h = hash_mix(h, n_rays);
  h = hash_mix(h, depth_slots);
  h = hash_mix(h, priv_dim);
  h = hash_mix(h, conv1_out);
  h = hash_mix(h, conv1_k);
  h = hash_mix(h, conv1_stride);
  h = hash_mix(h, conv2_out);
  h = hash_mix(h, conv2_k);
  h = hash_mix(h, conv2_stride);
  h = hash_mix(h, static_cast<std::uint64_t>(trunk.size()));
  for (int w : trunk) h = hash_mix(h, w);
  h = hash_mix(h, action_dim);
  h = hash_mix(h, std::string_view(activation));
  h = hash_mix(h, log_std_init);
  h = hash_mix(h, adapters);
  h = hash_mix(h, adapter_width);
  h = hash_mix(h, residual);
  h = hash_mix(h, static_cast<std::uint64_t>(residual_hidden.size()));
  for (int w : residual_hidden) h = hash_mix(h, w);
  return h;
}

ActorCritic ActorCritic::build(const NetConfig& cfg, std::uint64_t seed) {
  if (cfg.trunk.empty()) throw std::runtime_error("policy: trunk must be nonempty");
  ActorCritic net;
  net.cfg_ = cfg;
  net.act_ = act_from_name(cfg.activation);
  net.actor_ = make_tower(net.params_, cfg, "actor", cfg.action_dim, 0);
  if (cfg.residual) {
    int in = cfg.actor_obs_dim();
    int idx = 1;
    for (int hdim : cfg.residual_hidden) {
      net.res_.push_back(DenseSpec::create(
          net.params_, "actor.residual.l" + std::to_string(idx++), in, hdim));
      in = hdim;
    }
    net.res_.push_back(
        DenseSpec::create(net.params_, "actor.residual.head", in, cfg.action_dim));
  }
  net.log_std_off_ = net.params_.add("log_std", static_cast<std::size_t>(cfg.action_dim));
  net.critic_ = make_tower(net.params_, cfg, "critic", 1, cfg.priv_dim);

  Rng rng(derive_seed(seed, 0x6e65747300ULL));
  const double gain = net.act_ == Act::Tanh ? 5.0 / 3.0 : std::sqrt(2.0);
  init_tower(net.params_, net.actor_, rng, gain, 0.01);
  for (std::size_t i = 0; i + 1 < net.res_.size(); ++i)
    init_dense(net.params_, net.res_[i], rng, gain);
  // residual head stays zero: attaching it must not change the policy
  for (int i = 0; i < cfg.action_dim; ++i)
    net.params_.values()[net.log_std_off_ + i] = cfg.log_std_init;
  init_tower(net.params_, net.critic_, rng, gain, 1.0);
  return net;
}

std::uint64_t ActorCritic::arch_digest() const {
  return hash_mix(cfg_.digest(), params_.shape_digest());
}

void ActorCritic::tower_forward(const Tower& t, const Mat& obs, TowerCache& c) const {
  const int P = cfg_.proprio_rows();
  const int R = cfg_.n_rays;
  const int S = cfg_.depth_slots;
  const auto B = obs.cols();
  if (obs.rows() != P + R * S + t.priv)
    throw std::runtime_error("policy: observation dim mismatch");

  c.depth_in.resize(R, S * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int s = 0; s < S; ++s) {
      for (int r = 0; r < R; ++r) c.depth_in(r, b * S + s) = obs(P + s * R + r, b);
    }
  }
  t.conv1.forward(params_, c.depth_in, c.col1, c.y1);
  act_forward(act_, c.y1);
  const Mat* feat = &c.y1;
  if (cfg_.adapters) {
    t.ad1.forward(params_, act_, *feat, c.ad1_hidden, c.y1a);
    feat = &c.y1a;
  }
  t.conv2.forward(params_, *feat, c.col2, c.y2);
  act_forward(act_, c.y2);
  feat = &c.y2;
  if (cfg_.adapters) {
    t.ad2.forward(params_, act_, *feat, c.ad2_hidden, c.y2a);
    feat = &c.y2a;
  }

  const int F = cfg_.conv2_out * t.conv2.len_out();
  c.trunk_in.resize(P + S * F + t.priv, B);
  c.trunk_in.topRows(P) = obs.topRows(P);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < F; ++j) c.trunk_in(P + s * F + j, b) = (*feat)(j, b * S + s);
    }
  }
  if (t.priv > 0) c.trunk_in.bottomRows(t.priv) = obs.bottomRows(t.priv);

  c.h.resize(t.trunk.size());
  c.ha.resize(t.trunk.size());
  c.ad_hidden.resize(t.trunk.size());
  const Mat* x = &c.trunk_in;
  for (std::size_t i = 0; i < t.trunk.size(); ++i) {
    t.trunk[i].forward(params_, *x, c.h[i]);
    act_forward(act_, c.h[i]);
    x = &c.h[i];
    if (cfg_.adapters) {
      t.trunk_ad[i].forward(params_, act_, *x, c.ad_hidden[i], c.ha[i]);
      x = &c.ha[i];
    }
  }
  t.head.forward(params_, *x, c.out);
}

void ActorCritic::tower_backward(const Tower& t, const TowerCache& c, const Mat& dout,
                                 std::vector<double>& grad) const {
  const auto B = dout.cols();
  const std::size_t L = t.trunk.size();
  const Mat& x_last = cfg_.adapters ? c.ha[L - 1] : c.h[L - 1];
  Mat d = Mat::Zero(x_last.rows(), B);
  t.head.backward(params_, x_last, dout, grad, &d);
  for (std::size_t i = L; i-- > 0;) {
    if (cfg_.adapters) t.trunk_ad[i].backward(params_, act_, c.h[i], c.ad_hidden[i], d, grad);
    act_backward(act_, c.h[i], d);
    const Mat& xin = (i == 0) ? c.trunk_in : (cfg_.adapters ? c.ha[i - 1] : c.h[i - 1]);
    Mat dprev = Mat::Zero(xin.rows(), B);
    t.trunk[i].backward(params_, xin, d, grad, &dprev);
    d.swap(dprev);
  }

  const int P = cfg_.proprio_rows();
  const int S = cfg_.depth_slots;
  const int F = cfg_.conv2_out * t.conv2.len_out();
  Mat dfeat2 = Mat::Zero(F, S * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < F; ++j) dfeat2(j, b * S + s) = d(P + s * F + j, b);
    }
  }
  if (cfg_.adapters) t.ad2.backward(params_, act_, c.y2, c.ad2_hidden, dfeat2, grad);
  act_backward(act_, c.y2, dfeat2);
  Mat dfeat1 = Mat::Zero(c.y1.rows(), S * B);
  t.conv2.backward(params_, c.col2, dfeat2, grad, &dfeat1);
  if (cfg_.adapters) t.ad1.backward(params_, act_, c.y1, c.ad1_hidden, dfeat1, grad);
  act_backward(act_, c.y1, dfeat1);
  t.conv1.backward(params_, c.col1, dfeat1, grad, nullptr);
}

void ActorCritic::actor_forward(const Mat& obs, ActorCache& c) const {
  tower_forward(actor_, obs, c.tower);
  if (cfg_.residual) {
    c.obs = obs;
    c.res_h.resize(res_.size() - 1);
    const Mat* x = &c.obs;
    for (std::size_t i = 0; i + 1 < res_.size(); ++i) {
      res_[i].forward(params_, *x, c.res_h[i]);
      act_forward(act_, c.res_h[i]);
      x = &c.res_h[i];
    }
    res_.back().forward(params_, *x, c.res_out);
    c.tower.out += c.res_out;
  }
}

void ActorCritic::actor_backward(const ActorCache& c, const Mat& dmean,
                                 std::vector<double>& grad) const {
  if (grad.size() != params_.size())
    throw std::runtime_error("policy: gradient buffer size mismatch");
  tower_backward(actor_, c.tower, dmean, grad);
  if (cfg_.residual) {
    const std::size_t L = res_.size() - 1;
    const Mat& x_last = (L == 0) ? c.obs : c.res_h[L - 1];
    Mat d = Mat::Zero(x_last.rows(), dmean.cols());
    res_.back().backward(params_, x_last, dmean, grad, L == 0 ? nullptr : &d);
    for (std::size_t i = L; i-- > 0;) {
      act_backward(act_, c.res_h[i], d);
      const Mat& xin = (i == 0) ? c.obs : c.res_h[i - 1];
      Mat dprev;
      if (i > 0) dprev = Mat::Zero(xin.rows(), dmean.cols());
      res_[i].backward(params_, xin, d, grad, i == 0 ? nullptr : &dprev);
      d.swap(dprev);
    }
  }
}

void ActorCritic::critic_forward(const Mat& obs, CriticCache& c) const {
  tower_forward(critic_, obs, c.tower);
}

void ActorCritic::critic_backward(const CriticCache& c, const Mat& dvalue,
                                  std::vector<double>& grad) const {
  if (grad.size() != params_.size())
    throw std::runtime_error("policy: gradient buffer size mismatch");
  tower_backward(critic_, c.tower, dvalue, grad);
}

Eigen::VectorXd ActorCritic::act_mean(const Eigen::VectorXd& obs) const {
  ActorCache c;
  actor_forward(obs, c);
  return c.tower.out.col(0);
}

double ActorCritic::value(const Eigen::VectorXd& obs) const {
  CriticCache c;
  critic_forward(obs, c);
  return c.tower.out(0, 0);
}

}  // namespace parkour::nn
