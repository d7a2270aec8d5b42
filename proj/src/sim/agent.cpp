#include "sim/agent.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace parkour::sim {

Vec7 AgentState::positions() const {
  Vec7 u;
  u << x, z, theta, q(0), q(1), q(2), q(3);
  return u;
}

Vec7 AgentState::velocities() const {
  Vec7 ud;
  ud << xd, zd, omega, qd(0), qd(1), qd(2), qd(3);
  return ud;
}

void AgentState::set_positions(const Vec7& u) {
  x = u(0);
  z = u(1);
  theta = u(2);
  q = u.segment<4>(3);
}

void AgentState::set_velocities(const Vec7& ud) {
  xd = ud(0);
  zd = ud(1);
  omega = ud(2);
  qd = ud.segment<4>(3);
}

bool AgentState::finite() const {
  return std::isfinite(x) && std::isfinite(z) && std::isfinite(theta) && std::isfinite(xd) &&
         std::isfinite(zd) && std::isfinite(omega) && q.allFinite() && qd.allFinite();
}

namespace {

// Absolute link angles: torso, thigh_L, shank_L, thigh_R, shank_R.
// Each is a sum of generalized coordinates; -1 pads unused slots.
constexpr int kNumAngles = 5;
constexpr int kAngCoords[kNumAngles][3] = {
    {2, -1, -1}, {2, 3, -1}, {2, 3, 4}, {2, 5, -1}, {2, 5, 6}};

struct Kin {
  double s[kNumAngles], c[kNumAngles];  // sin/cos of absolute angles
  double rate[kNumAngles];              // absolute angular rates
};

Kin make_kin(const Vec7& u, const Vec7& ud) {
  Kin k;
  for (int a = 0; a < kNumAngles; ++a) {
    double phi = 0, rate = 0;
    for (int j : kAngCoords[a]) {
      if (j < 0) break;
      phi += u(j);
      rate += ud(j);
    }
    k.s[a] = std::sin(phi);
    k.c[a] = std::cos(phi);
    k.rate[a] = rate;
  }
  return k;
}

// A chain point is base (x,z) plus Σ a·d(φ) with d(φ) = (sin φ, −cos φ):
// links hang straight down at zero angle.
struct Term {
  double a;
  int ang;
};

using Jac = Eigen::Matrix<double, 2, 7>;

struct PointKin {
  Vec2 pos;
  Jac jac;
  Vec2 centripetal;  // J̇·u̇
};

PointKin chain_point(const Kin& k, const Vec7& u, const Term* terms, int n_terms) {
  PointKin pk;
  pk.pos = Vec2(u(0), u(1));
  pk.jac.setZero();
  pk.jac(0, 0) = 1.0;
  pk.jac(1, 1) = 1.0;
  pk.centripetal.setZero();
  for (int i = 0; i < n_terms; ++i) {
    const double a = terms[i].a;
    const int ang = terms[i].ang;
    pk.pos += a * Vec2(k.s[ang], -k.c[ang]);
    const Vec2 dcol = a * Vec2(k.c[ang], k.s[ang]);  // ∂/∂φ of a·d(φ)
    for (int j : kAngCoords[ang]) {
      if (j < 0) break;
      pk.jac.col(j) += dcol;
    }
    // d²/dt² of a·d(φ) at constant φ̇: −a·d(φ)·φ̇²
    pk.centripetal += -a * Vec2(k.s[ang], -k.c[ang]) * k.rate[ang] * k.rate[ang];
  }
  return pk;
}

struct Body {
  double mass, inertia;
  Term terms[3];
  int n_terms;
  int ang;  // absolute angle of this body (for the ω selector)
};

// Body table and foot chains derived from the config each call (cheap).
struct Model {
  Body bodies[5];
  Term foot_terms[2][3];
};

Model make_model(const PhysicsConfig& cfg) {
  const double ht = cfg.torso_len / 2.0;  // hip offset from torso COM
  const double hl = cfg.link_len / 2.0;
  const double ll = cfg.link_len;
  const double mt = cfg.torso_mass, ml = cfg.link_mass;
  const double it = cfg.torso_inertia(), il = cfg.link_inertia();
  Model m;
  m.bodies[0] = {mt, it, {}, 0, 0};                                              // torso
  m.bodies[1] = {ml, il, {{ht, 0}, {hl, 1}}, 2, 1};                              // thigh L
  m.bodies[2] = {ml, il, {{ht, 0}, {ll, 1}, {hl, 2}}, 3, 2};                     // shank L
  m.bodies[3] = {ml, il, {{ht, 0}, {hl, 3}}, 2, 3};                              // thigh R
  m.bodies[4] = {ml, il, {{ht, 0}, {ll, 3}, {hl, 4}}, 3, 4};                     // shank R
  m.foot_terms[0][0] = {ht, 0}, m.foot_terms[0][1] = {ll, 1}, m.foot_terms[0][2] = {ll, 2};
  m.foot_terms[1][0] = {ht, 0}, m.foot_terms[1][1] = {ll, 3}, m.foot_terms[1][2] = {ll, 4};
  return m;
}

}  // namespace

Vec4 pd_torque(const PhysicsConfig& cfg, const Vec4& target, const Vec4& q, const Vec4& qd) {
  Vec4 tau = cfg.kp * (target - q) - cfg.kd * qd;
  return tau.cwiseMax(-cfg.tau_max).cwiseMin(cfg.tau_max);
}

StepEvents step(const PhysicsConfig& cfg, const TerrainProfile& profile, AgentState& state,
                const Vec4& target, double dt, int substeps) {
  const Model model = make_model(cfg);
  const double h = dt / substeps;
  Vec7 u = state.positions();
  Vec7 ud = state.velocities();

  StepEvents ev;
  bool prev_contact[2] = {state.foot_contact[0], state.foot_contact[1]};
  double air_time[2] = {state.foot_air_time[0], state.foot_air_time[1]};
  double contact_time[2] = {state.foot_contact_time[0], state.foot_contact_time[1]};
  double anchor[2] = {state.foot_anchor[0], state.foot_anchor[1]};
  bool anchor_ok[2] = {state.anchor_valid[0], state.anchor_valid[1]};

  for (int ss = 0; ss < substeps; ++ss) {
    const Kin k = make_kin(u, ud);
    const Vec4 tau = pd_torque(cfg, target, u.segment<4>(3), ud.segment<4>(3));
    if (ss == 0) ev.tau = tau;
    ev.joint_work += tau.cwiseProduct(ud.segment<4>(3)) * h;

    Mat7 M = Mat7::Zero();
    Vec7 rhs = Vec7::Zero();
    for (const Body& b : model.bodies) {
      const PointKin pk = chain_point(k, u, b.terms, b.n_terms);
      M.noalias() += b.mass * pk.jac.transpose() * pk.jac;
      Vec7 w = Vec7::Zero();
      for (int j : kAngCoords[b.ang]) {
        if (j < 0) break;
        w(j) = 1.0;
      }
      M.noalias() += b.inertia * w * w.transpose();
      rhs.noalias() += pk.jac.transpose() * Vec2(0.0, -b.mass * cfg.gravity);
      rhs.noalias() -= b.mass * pk.jac.transpose() * pk.centripetal;
    }
    rhs.segment<4>(3) += tau;

    for (int f = 0; f < 2; ++f) {
      const PointKin pk = chain_point(k, u, model.foot_terms[f], 3);
      const Vec2 v = pk.jac * ud;
      const double ground = profile.height(pk.pos.x());
      const double pen = ground - pk.pos.y();
      FootContact fc;
      fc.pos = pk.pos;
      fc.vel = v;
      if (pen > 0.0) {
        double fz = cfg.contact_k * pen - cfg.contact_c * v.y();
        fz = std::max(fz, 0.0);
        const double cap = cfg.friction_mu * fz;
        if (!anchor_ok[f]) {
          anchor[f] = pk.pos.x();
          anchor_ok[f] = true;
        }
        double fx = -cfg.contact_kt * (pk.pos.x() - anchor[f]) - cfg.contact_ct * v.x();
        if (fx > cap || fx < -cap) {
          fx = std::clamp(fx, -cap, cap);
          // sliding: drag the anchor so the spring alone carries the cap force
          anchor[f] = pk.pos.x() + fx / cfg.contact_kt;
        }
        rhs.noalias() += pk.jac.transpose() * Vec2(fx, fz);
        fc.in_contact = true;
        fc.fz = fz;
        fc.fx = fx;
      } else {
        anchor_ok[f] = false;
      }
      // phase-time bookkeeping at substep resolution
      if (fc.in_contact) {
        if (!prev_contact[f] && air_time[f] > 0.0 && !ev.feet[f].touchdown) {
          ev.feet[f].touchdown = true;
          ev.feet[f].air_time_at_touchdown = air_time[f];
        }
        air_time[f] = 0.0;
        contact_time[f] += h;
      } else {
        air_time[f] += h;
        contact_time[f] = 0.0;
      }
      prev_contact[f] = fc.in_contact;
      // last substep's snapshot wins
      ev.feet[f].in_contact = fc.in_contact;
      ev.feet[f].fz = fc.fz;
      ev.feet[f].fx = fc.fx;
      ev.feet[f].pos = fc.pos;
      ev.feet[f].vel = fc.vel;
    }

    const Vec7 acc = M.ldlt().solve(rhs);
    ud += h * acc;
    u += h * ud;
  }

  state.set_positions(u);
  state.set_velocities(ud);
  state.foot_contact = {prev_contact[0], prev_contact[1]};
  state.foot_air_time = {air_time[0], air_time[1]};
  state.foot_contact_time = {contact_time[0], contact_time[1]};
  state.foot_anchor = {anchor[0], anchor[1]};
  state.anchor_valid = {anchor_ok[0], anchor_ok[1]};
  state.time += dt;
  ev.fault = !state.finite();
  return ev;
}

namespace {
Vec2 eval_point(const AgentState& s, const Term* terms, int n) {
  const Kin k = make_kin(s.positions(), s.velocities());
  return chain_point(k, s.positions(), terms, n).pos;
}
}  // namespace

Vec2 hip_pos(const PhysicsConfig& cfg, const AgentState& s) {
  const Term t{cfg.torso_len / 2.0, 0};
  return eval_point(s, &t, 1);
}

Vec2 head_pos(const PhysicsConfig& cfg, const AgentState& s) {
  const Term t{-cfg.torso_len / 2.0, 0};
  return eval_point(s, &t, 1);
}

Vec2 knee_pos(const PhysicsConfig& cfg, const AgentState& s, int leg) {
  const Term t[2] = {{cfg.torso_len / 2.0, 0}, {cfg.link_len, leg == 0 ? 1 : 3}};
  return eval_point(s, t, 2);
}

Vec2 foot_pos(const PhysicsConfig& cfg, const AgentState& s, int leg) {
  const Model m = make_model(cfg);
  return eval_point(s, m.foot_terms[leg], 3);
}

Vec2 foot_vel(const PhysicsConfig& cfg, const AgentState& s, int leg) {
  const Model m = make_model(cfg);
  const Kin k = make_kin(s.positions(), s.velocities());
  const PointKin pk = chain_point(k, s.positions(), m.foot_terms[leg], 3);
  return pk.jac * s.velocities();
}

std::array<Vec2, 7> body_points(const PhysicsConfig& cfg, const AgentState& s) {
  return {foot_pos(cfg, s, 0), foot_pos(cfg, s, 1), knee_pos(cfg, s, 0), knee_pos(cfg, s, 1),
          hip_pos(cfg, s),     Vec2(s.x, s.z),      head_pos(cfg, s)};
}

double kinetic_energy(const PhysicsConfig& cfg, const AgentState& s, const Vec7& ud) {
  const Model model = make_model(cfg);
  const Vec7 u = s.positions();
  const Kin k = make_kin(u, ud);
  double ke = 0.0;
  for (const Body& b : model.bodies) {
    const PointKin pk = chain_point(k, u, b.terms, b.n_terms);
    const Vec2 v = pk.jac * ud;
    double w = 0.0;
    for (int j : kAngCoords[b.ang]) {
      if (j < 0) break;
      w += ud(j);
    }
    ke += 0.5 * b.mass * v.squaredNorm() + 0.5 * b.inertia * w * w;
  }
  return ke;
}

double potential_energy(const PhysicsConfig& cfg, const AgentState& s) {
  const Model model = make_model(cfg);
  const Vec7 u = s.positions();
  const Kin k = make_kin(u, s.velocities());
  double pe = 0.0;
  for (const Body& b : model.bodies) {
    const PointKin pk = chain_point(k, u, b.terms, b.n_terms);
    pe += b.mass * cfg.gravity * pk.pos.y();
  }
  return pe;
}

double total_energy(const PhysicsConfig& cfg, const AgentState& s) {
  return kinetic_energy(cfg, s, s.velocities()) + potential_energy(cfg, s);
}

AgentState default_state(const PhysicsConfig& cfg, double x, double ground_h) {
  AgentState s;
  s.x = x;
  s.theta = 0;
  for (int j = 0; j < 4; ++j) s.q(j) = cfg.q_default[j];
  // place the torso so the lower foot rests exactly on the surface
  const double drop_l = cfg.torso_len / 2.0 + cfg.link_len * std::cos(s.q(0)) +
                        cfg.link_len * std::cos(s.q(0) + s.q(1));
  const double drop_r = cfg.torso_len / 2.0 + cfg.link_len * std::cos(s.q(2)) +
                        cfg.link_len * std::cos(s.q(2) + s.q(3));
  s.z = ground_h + std::max(drop_l, drop_r);
  return s;
}

}  // namespace parkour::sim
