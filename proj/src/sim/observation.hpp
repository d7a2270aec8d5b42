#pragma once

#include <random>
#include <vector>

#include "sim/agent.hpp"
#include "sim/sensor.hpp"

namespace parkour::sim {

/// Uniform sensor-noise half-ranges applied to the actor's copy at capture
/// time (the critic always sees the clean signal).
struct NoiseScales {
  double ang_vel = 0.2;
  double gravity = 0.05;
  double cmd = 0.0;
  double q = 0.01;
  double qd = 0.5;
  double a_prev = 0.0;
  double depth = 0.02;
};

/// Fixed per-channel normalization applied after noise, identical for actor
/// and critic.
struct ObsScales {
  double ang_vel = 0.25;
  double gravity = 1.0;
  double cmd = 1.0;
  double q = 1.0;
  double qd = 0.05;
  double a_prev = 1.0;
  double depth = 0.2;
  double lin_vel = 1.0;  // critic-only channels
};

struct ObsConfig {
  int history = 8;      // stacked proprioception slots
  int stride = 5;       // control steps between depth slots
  int depth_slots = 4;  // number of strided scans
  NoiseScales noise;
  ObsScales scales;
};

/// One control step's raw proprioception, before noise/scaling.
struct ProprioSample {
  double omega = 0;
  double sin_theta = 0, cos_theta = 0;
  double cmd_vx = 0;
  Vec4 q = Vec4::Zero();
  Vec4 qd = Vec4::Zero();
  Vec4 a_prev = Vec4::Zero();
  double xd = 0, zd = 0;  // critic-only
};

inline constexpr int kProprioDim = 16;  // ω + (sinθ,cosθ) + cmd + q(4) + q̇(4) + a_prev(4)

struct Observation {
  std::vector<float> actor;
  std::vector<float> critic;
};

/// Ring-buffered history assembly. Actor layout (fixed, in order):
///   [p_{t-h+1} … p_t] oldest-first, h slots of 16 channels each,
///   then depth slots newest-first: scan_t, scan_{t-ℓ}, …, scan_{t-(m-1)ℓ}.
/// Critic layout: the same fields noise-free, then (ẋ, ż) of the current step.
/// Slots before the first push read as zeros.
class ObservationAssembler {
 public:
  ObservationAssembler(const ObsConfig& cfg, int n_rays);

  void reset();
  /// Captures one step: applies actor noise (consuming a fixed number of rng
  /// draws regardless of scales), then normalization, and stores both copies.
  void push(const ProprioSample& raw, const DepthScan& scan, std::mt19937_64& rng);
  Observation assemble() const;

  int actor_dim() const;
  int critic_dim() const { return actor_dim() + 2; }
  int min_history() const;  // buffer capacity needed

 private:
  ObsConfig cfg_;
  int n_rays_;
  int count_ = 0;  // pushes since reset
  std::vector<std::vector<float>> proprio_actor_, proprio_critic_;  // ring, size capacity
  std::vector<std::vector<float>> scans_actor_, scans_critic_;
  float lin_vel_[2] = {0, 0};

  int capacity() const;
};

}  // namespace parkour::sim
