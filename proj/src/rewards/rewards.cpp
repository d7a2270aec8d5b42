#include "rewards/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace parkour::rewards {

namespace {

struct TermDefault {
  const char* name;
  double weight;
  bool enabled;
};

constexpr TermDefault kTable[kNumTerms] = {
    {"lin_vel_tracking", 2.0, true},
    {"ang_vel_tracking", 0.1, false},
    {"heading_error", -1.0, true},
    {"dont_wait", -0.5, true},
    {"is_alive", 3.0, true},
    {"stand_still", -0.3, true},
    {"edge_penetration", -1.0, true},
    {"feet_air_time", 0.5, true},
    {"feet_slide", -0.4, true},
    {"joint_deviation_hip", -0.5, false},
    {"base_ang_vel", -0.05, true},
    {"joint_torques", -1.5e-7, true},
    {"joint_acc", -1.25e-7, true},
    {"joint_vel", -1.0e-4, true},
    {"action_rate", -0.005, true},
    {"flat_orientation", -3.0, true},
    {"pelvis_orientation", -3.0, false},
    {"feet_orientation", -0.4, true},
    {"feet_height_error", -0.1, true},
    {"feet_distance", 1.0, false},
    {"energy", -5.0e-5, true},
    {"freeze_upper_body", -0.004, false},
    {"joint_pos_limits", -1.0, true},
    {"joint_vel_limits", -1.0, true},
    {"torque_limits", -0.01, true},
    {"undesired_contacts", -1.0, true},
    {"amp_style", 0.25, true},
};

constexpr double kEdgeBand = 0.05;
constexpr double kEdgeEps = 0.1;
constexpr double kFootHeightOffset = 0.035;
constexpr double kFootHeightClip = 0.3;

double indicator(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

const char* term_name(Term t) { return kTable[static_cast<int>(t)].name; }

RewardConfig RewardConfig::defaults() {
  RewardConfig cfg;
  for (int i = 0; i < kNumTerms; ++i) {
    cfg.weight[static_cast<std::size_t>(i)] = kTable[i].weight;
    cfg.enabled[static_cast<std::size_t>(i)] = kTable[i].enabled;
  }
  return cfg;
}

std::uint64_t RewardConfig::digest() const {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  auto mix = [&h](const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (int i = 0; i < kNumTerms; ++i) {
    const double w = weight[static_cast<std::size_t>(i)];
    unsigned char buf[sizeof(double)];
    std::memcpy(buf, &w, sizeof(double));
    mix(buf, sizeof(double));
    const unsigned char e = enabled[static_cast<std::size_t>(i)] ? 1 : 0;
    mix(&e, 1);
  }
  return h;
}

StepContext make_context(const sim::PhysicsConfig& physics, const sim::TerrainProfile& profile,
                         const sim::StepData& data, double amp_score) {
  StepContext ctx;
  const sim::AgentState& s = data.next;
  ctx.x = s.x;
  ctx.z = s.z;
  ctx.theta = s.theta;
  ctx.xd = s.xd;
  ctx.zd = s.zd;
  ctx.omega = s.omega;
  ctx.q = s.q;
  ctx.qd = s.qd;
  ctx.qd_prev = data.prev.qd;
  ctx.action = data.action;
  ctx.action_prev = data.action_prev;
  ctx.tau = data.tau;
  ctx.command_vx = data.command_vx;
  ctx.dt = data.dt;
  ctx.contact = s.foot_contact;
  ctx.air_time = s.foot_air_time;
  ctx.contact_time = s.foot_contact_time;
  for (int f = 0; f < 2; ++f) {
    ctx.foot_pos[static_cast<std::size_t>(f)] = data.events.feet[static_cast<std::size_t>(f)].pos;
    ctx.foot_vel[static_cast<std::size_t>(f)] = data.events.feet[static_cast<std::size_t>(f)].vel;
  }
  ctx.amp_score = amp_score;
  ctx.profile = &profile;
  ctx.physics = &physics;
  return ctx;
}

double amp_style(double d_score) {
  const double v = 1.0 - 0.25 * (d_score - 1.0) * (d_score - 1.0);
  return std::max(0.0, v);
}

double edge_penetration(const std::array<Vec2, 2>& foot_pos, const std::array<Vec2, 2>& foot_vel,
                        const std::array<bool, 2>& contact, const std::vector<double>& edges,
                        double band, double eps) {
  if (band <= 0.0) throw std::invalid_argument("edge_penetration: band must be positive");
  double sum = 0.0;
  for (std::size_t f = 0; f < 2; ++f) {
    if (!contact[f] || edges.empty()) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (double e : edges) nearest = std::min(nearest, std::abs(foot_pos[f].x() - e));
    const double depth = band - nearest;
    if (depth > 0.0) sum += depth * (foot_vel[f].norm() + eps);
  }
  return sum;
}

RewardBreakdown compute_rewards(const StepContext& ctx, const RewardConfig& cfg) {
  if (ctx.profile == nullptr || ctx.physics == nullptr)
    throw std::invalid_argument("compute_rewards: context missing profile/physics");
  const sim::PhysicsConfig& phys = *ctx.physics;
  const sim::TerrainProfile& prof = *ctx.profile;

  RewardBreakdown out;
  auto eval = [&](Term t, auto&& fn) {
    const int i = static_cast<int>(t);
    if (!cfg.enabled[static_cast<std::size_t>(i)]) return;
    const double raw = fn();
    out.raw[static_cast<std::size_t>(i)] = raw;
    out.weighted[static_cast<std::size_t>(i)] = cfg.weight[static_cast<std::size_t>(i)] * raw;
  };

  eval(Term::lin_vel_tracking, [&] {
    const double e = ctx.command_vx - ctx.xd;
    return std::exp(-(e * e) / 0.25);
  });
  // ang_vel_tracking: no yaw coordinate; row stays disabled
  eval(Term::heading_error, [&] {
    return 0.0;  // |ω*_z| with the planar yaw command pinned to zero
  });
  eval(Term::dont_wait, [&] {
    if (!(ctx.command_vx > 0.3)) return 0.0;
    return indicator(ctx.xd < 0.15) + indicator(ctx.xd < 0.0) + indicator(ctx.xd < -0.15);
  });
  eval(Term::is_alive, [&] { return 1.0; });
  eval(Term::stand_still, [&] {
    if (!(std::abs(ctx.command_vx) < 0.15)) return 0.0;
    double l1 = 0.0;
    for (int j = 0; j < 4; ++j)
      l1 += std::abs(ctx.q(j) - phys.q_default[static_cast<std::size_t>(j)]);
    return l1 - 4.0;
  });
  eval(Term::edge_penetration, [&] {
    return edge_penetration(ctx.foot_pos, ctx.foot_vel, ctx.contact, prof.edge_markers, kEdgeBand,
                            kEdgeEps);
  });
  eval(Term::feet_air_time, [&] {
    const int support = (ctx.contact[0] ? 1 : 0) + (ctx.contact[1] ? 1 : 0);
    if (support != 1 || !(std::abs(ctx.command_vx) > 0.15)) return 0.0;
    const double t0 = ctx.contact[0] ? ctx.contact_time[0] : ctx.air_time[0];
    const double t1 = ctx.contact[1] ? ctx.contact_time[1] : ctx.air_time[1];
    return std::min(t0, t1);
  });
  eval(Term::feet_slide, [&] {
    double sum = 0.0;
    for (std::size_t f = 0; f < 2; ++f)
      if (ctx.contact[f]) sum += std::abs(ctx.foot_vel[f].x());
    return sum;
  });
  eval(Term::base_ang_vel, [&] { return ctx.omega * ctx.omega; });
  eval(Term::joint_torques, [&] { return ctx.tau.squaredNorm(); });
  eval(Term::joint_acc, [&] {
    const Vec4 qdd = (ctx.qd - ctx.qd_prev) / ctx.dt;
    return qdd.squaredNorm();
  });
  eval(Term::joint_vel, [&] { return ctx.qd.squaredNorm(); });
  eval(Term::action_rate, [&] { return (ctx.action - ctx.action_prev).squaredNorm(); });
  eval(Term::flat_orientation, [&] {
    const double g = std::sin(ctx.theta);  // gravity projected onto the plane floor
    return g * g;
  });
  eval(Term::feet_orientation, [&] {
    // shank attitude stands in for the sole of a point foot
    double sum = 0.0;
    const double shank[2] = {ctx.theta + ctx.q(0) + ctx.q(1), ctx.theta + ctx.q(2) + ctx.q(3)};
    for (std::size_t f = 0; f < 2; ++f)
      if (ctx.contact[f]) sum += std::abs(std::sin(shank[f]));
    return sum;
  });
  eval(Term::feet_height_error, [&] {
    // nearest-sample terrain height: a foot contacting an edge while hanging
    // over the drop reads the low sample and gets penalized
    double sum = 0.0;
    for (std::size_t f = 0; f < 2; ++f) {
      if (!ctx.contact[f]) continue;
      const double h = prof.sample_height(ctx.foot_pos[f].x());
      sum += std::clamp(ctx.foot_pos[f].y() - h - kFootHeightOffset, 0.0, kFootHeightClip);
    }
    return sum;
  });
  eval(Term::energy, [&] {
    const double k = phys.tau_max * phys.qdot_max;
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double p = ctx.tau(j) * ctx.qd(j) / k;
      sum += p * p;
    }
    return sum;
  });
  eval(Term::joint_pos_limits, [&] {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      sum += std::max(0.0, ctx.q(j) - phys.q_hi[static_cast<std::size_t>(j)]);
      sum += std::max(0.0, phys.q_lo[static_cast<std::size_t>(j)] - ctx.q(j));
    }
    return sum;
  });
  eval(Term::joint_vel_limits, [&] {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += std::max(0.0, std::abs(ctx.qd(j)) - 0.9 * phys.qdot_max);
    return sum;
  });
  eval(Term::torque_limits, [&] {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double over = std::max(0.0, std::abs(ctx.tau(j)) - 0.8 * phys.tau_max);
      sum += over * over;
    }
    return sum;
  });
  eval(Term::undesired_contacts, [&] {
    sim::AgentState s;
    s.x = ctx.x;
    s.z = ctx.z;
    s.theta = ctx.theta;
    s.q = ctx.q;
    const auto pts = sim::body_points(phys, s);
    for (std::size_t i = 2; i < pts.size(); ++i)  // 0,1 are the feet
      if (pts[i].y() < prof.height(pts[i].x())) return 1.0;
    return 0.0;
  });
  eval(Term::amp_style, [&] { return amp_style(ctx.amp_score); });

  double total = 0.0;
  for (int i = 0; i < kNumTerms; ++i) total += out.weighted[static_cast<std::size_t>(i)];
  out.total = total;
  return out;
}

std::vector<RewardBreakdown> replay_rewards(const sim::Trajectory& traj,
                                            const sim::PhysicsConfig& physics,
                                            const sim::TerrainProfile& profile,
                                            const RewardConfig& cfg) {
  if (traj.records.empty()) throw std::invalid_argument("replay_rewards: empty trajectory");
  std::vector<RewardBreakdown> out;
  out.reserve(traj.records.size() - 1);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    const sim::TrajRecord& prev = traj.records[i - 1];
    const sim::TrajRecord& cur = traj.records[i];
    sim::StepData data;
    data.prev = prev.state;
    data.next = cur.state;
    data.action = cur.action;
    data.action_prev = prev.action;  // record 0 stores the zero initial action
    data.tau = cur.tau;
    data.events = cur.events;
    data.command_vx = traj.command_vx;
    data.dt = traj.dt;
    data.status = cur.status;
    out.push_back(compute_rewards(make_context(physics, profile, data), cfg));
  }
  return out;
}

void append_reward_csv(const std::string& path, int iteration,
                       const std::vector<RewardBreakdown>& steps) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error("reward csv: cannot open " + path);
  if (fresh) f << "iteration,term,mean_raw,mean_weighted\n";
  if (steps.empty()) return;
  for (int i = 0; i < kNumTerms; ++i) {
    double raw = 0.0, weighted = 0.0;
    for (const auto& b : steps) {
      raw += b.raw[static_cast<std::size_t>(i)];
      weighted += b.weighted[static_cast<std::size_t>(i)];
    }
    const double n = static_cast<double>(steps.size());
    f << iteration << ',' << kTable[i].name << ',' << raw / n << ',' << weighted / n << '\n';
  }
}

}  // namespace parkour::rewards
