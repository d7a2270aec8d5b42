#pragma once

#include <array>

#include "sim/profile.hpp"

namespace parkour::sim {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

/// Physical parameters of the planar agent (sagittal plane: x forward, z up,
/// pitch θ positive tipping forward). Generalized coordinates:
/// u = (x, z, θ, hip_L, knee_L, hip_R, knee_R).
struct PhysicsConfig {
  double torso_mass = 10.0;
  double torso_len = 0.4;
  double link_mass = 2.0;  // each thigh/shank
  double link_len = 0.3;
  double gravity = 9.81;

  double kp = 30.0;
  double kd = 1.0;
  double tau_max = 80.0;
  double qdot_max = 20.0;  // normalizer for the energy reward, not a hard clamp

  std::array<double, 4> q_default{0.4, -0.3, -0.4, 0.3};
  std::array<double, 4> q_lo{-1.8, -2.4, -1.8, -2.4};
  std::array<double, 4> q_hi{1.8, 2.4, 1.8, 2.4};

  double contact_k = 5000.0;   // normal spring, N/m
  double contact_c = 100.0;    // normal damping, N·s/m
  double contact_kt = 5000.0;  // tangential stiction spring, N/m
  double contact_ct = 100.0;   // tangential damping, N·s/m
  double friction_mu = 0.8;

  double torso_inertia() const { return torso_mass * torso_len * torso_len / 12.0; }
  double link_inertia() const { return link_mass * link_len * link_len / 12.0; }
  double total_mass() const { return torso_mass + 4.0 * link_mass; }
};

struct AgentState {
  double x = 0, z = 0, theta = 0;
  double xd = 0, zd = 0, omega = 0;
  Vec4 q = Vec4::Zero();
  Vec4 qd = Vec4::Zero();
  std::array<bool, 2> foot_contact{false, false};
  std::array<double, 2> foot_air_time{0.0, 0.0};      // time since last contact loss
  std::array<double, 2> foot_contact_time{0.0, 0.0};  // time since last touchdown
  // stiction anchors: ground x each foot is stuck to while in contact
  std::array<double, 2> foot_anchor{0.0, 0.0};
  std::array<bool, 2> anchor_valid{false, false};
  double time = 0.0;

  Vec7 positions() const;
  Vec7 velocities() const;
  void set_positions(const Vec7& u);
  void set_velocities(const Vec7& ud);
  bool finite() const;
};

/// Per-foot contact summary for one control step (values from the last substep;
/// touchdown events aggregated across substeps).
struct FootContact {
  bool in_contact = false;
  bool touchdown = false;              // airborne→contact transition this step
  double air_time_at_touchdown = 0.0;  // valid when touchdown
  double fz = 0.0, fx = 0.0;
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
};

struct StepEvents {
  std::array<FootContact, 2> feet;
  Vec4 tau = Vec4::Zero();         // pd torque at control-step start
  Vec4 joint_work = Vec4::Zero();  // ∫ τ·q̇ dt per joint over the step
  bool fault = false;              // non-finite state detected
};

/// τ = kp(a − q) − kd·q̇, clamped to ±tau_max.
Vec4 pd_torque(const PhysicsConfig& cfg, const Vec4& target, const Vec4& q, const Vec4& qd);

/// Semi-implicit Euler over `substeps` equal slices of `dt`. The joint target
/// is held for the whole step while the PD torque is recomputed every substep
/// (holding the torque itself pumps the contact-driven joint mode, which has a
/// period of only a few substeps). Contact: vertical spring-damper against the
/// profile plus an anchored tangential spring, both Coulomb-capped at μ·Fz —
/// the anchor gives true stiction so a loaded stance does not creep.
StepEvents step(const PhysicsConfig& cfg, const TerrainProfile& profile, AgentState& state,
                const Vec4& target, double dt, int substeps);

// --- kinematics ---
Vec2 hip_pos(const PhysicsConfig& cfg, const AgentState& s);
Vec2 head_pos(const PhysicsConfig& cfg, const AgentState& s);
Vec2 knee_pos(const PhysicsConfig& cfg, const AgentState& s, int leg);  // leg 0 = left
Vec2 foot_pos(const PhysicsConfig& cfg, const AgentState& s, int leg);
Vec2 foot_vel(const PhysicsConfig& cfg, const AgentState& s, int leg);

/// Sample points checked against masked terrain: feet, knees, hip, torso
/// center, head (7 points).
std::array<Vec2, 7> body_points(const PhysicsConfig& cfg, const AgentState& s);

/// Kinetic energy from arbitrary generalized velocities at the state's pose
/// (used by the staggered-grid energy measurement in tests).
double kinetic_energy(const PhysicsConfig& cfg, const AgentState& s, const Vec7& ud);
double potential_energy(const PhysicsConfig& cfg, const AgentState& s);
double total_energy(const PhysicsConfig& cfg, const AgentState& s);

/// Standing state at torso x, feet resting on a surface of height `ground_h`,
/// joints at the default pose, zero velocity.
AgentState default_state(const PhysicsConfig& cfg, double x, double ground_h);

}  // namespace parkour::sim
