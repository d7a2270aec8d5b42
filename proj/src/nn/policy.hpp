#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nn/layers.hpp"

namespace parkour::nn {

/// Network architecture. The actor observation is laid out as
/// [proprio_hist · proprio_dim | depth_slots · n_rays]; the critic observation
/// appends priv_dim privileged rows. Each depth slot passes through a shared
/// two-layer 1-D conv encoder and is flattened into the trunk input.
struct NetConfig {
  int proprio_dim = 16;
  int proprio_hist = 8;
  int n_rays = 32;
  int depth_slots = 4;
  int priv_dim = 2;

  int conv1_out = 8;
  int conv1_k = 5;
  int conv1_stride = 2;
  int conv2_out = 4;
  int conv2_k = 3;
  int conv2_stride = 2;

  std::vector<int> trunk{128, 64};
  int action_dim = 4;
  std::string activation = "tanh";
  double log_std_init = -0.7;

  // test-time augmentations; both are exact identities at creation
  bool adapters = false;
  int adapter_width = 16;
  bool residual = false;
  std::vector<int> residual_hidden{64, 64};

  int proprio_rows() const { return proprio_dim * proprio_hist; }
  int depth_rows() const { return n_rays * depth_slots; }
  int actor_obs_dim() const { return proprio_rows() + depth_rows(); }
  int critic_obs_dim() const { return actor_obs_dim() + priv_dim; }
  std::uint64_t digest() const;
};

struct TowerCache {
  Mat depth_in;
  Mat col1, y1, y1a, ad1_hidden;
  Mat col2, y2, y2a, ad2_hidden;
  Mat trunk_in;
  std::vector<Mat> h, ha, ad_hidden;
  Mat out;
};

struct ActorCache {
  TowerCache tower;
  Mat obs;  // kept for the residual path
  std::vector<Mat> res_h;
  Mat res_out;
};

struct CriticCache {
  TowerCache tower;
};

/// Actor-critic pair over a shared FlatParams block. The two towers are
/// disjoint parameter ranges (asymmetric actor/critic); the Gaussian head is
/// a state-independent per-action log-std vector.
class ActorCritic {
 public:
  struct Tower {
    Conv1dSpec conv1, conv2;
    AdapterSpec ad1, ad2;
    std::vector<DenseSpec> trunk;
    std::vector<AdapterSpec> trunk_ad;
    DenseSpec head;
    int priv = 0;
  };

  static ActorCritic build(const NetConfig& cfg, std::uint64_t seed);

  const NetConfig& config() const { return cfg_; }
  FlatParams& params() { return params_; }
  const FlatParams& params() const { return params_; }
  Act activation() const { return act_; }
  /// Architecture identity: config digest mixed with the parameter table.
  std::uint64_t arch_digest() const;

  /// obs (actor_obs_dim × B) → cache.tower.out = action mean (action_dim × B).
  void actor_forward(const Mat& obs, ActorCache& cache) const;
  /// Accumulates d(loss)/d(params) into grad given d(loss)/d(mean).
  void actor_backward(const ActorCache& cache, const Mat& dmean,
                      std::vector<double>& grad) const;
  /// obs (critic_obs_dim × B) → cache.tower.out = value (1 × B).
  void critic_forward(const Mat& obs, CriticCache& cache) const;
  void critic_backward(const CriticCache& cache, const Mat& dvalue,
                       std::vector<double>& grad) const;

  std::size_t log_std_offset() const { return log_std_off_; }
  Eigen::Map<const Eigen::VectorXd> log_std() const {
    return {params_.data() + log_std_off_, cfg_.action_dim};
  }

  Eigen::VectorXd act_mean(const Eigen::VectorXd& obs) const;
  double value(const Eigen::VectorXd& obs) const;

 private:
  void tower_forward(const Tower& t, const Mat& obs, TowerCache& c) const;
  void tower_backward(const Tower& t, const TowerCache& c, const Mat& dout,
                      std::vector<double>& grad) const;

  NetConfig cfg_;
  Act act_ = Act::Tanh;
  FlatParams params_;
  Tower actor_;
  Tower critic_;
  std::vector<DenseSpec> res_;  // residual trunk + zero-init head (last)
  std::size_t log_std_off_ = 0;
};

}  // namespace parkour::nn
