#pragma once

#include <deque>
#include <string>

#include "sim/agent.hpp"
#include "sim/profile.hpp"

namespace parkour::sim {

enum class Status {
  running = 0,
  success = 1,
  fail_ground = 2,
  fail_orientation = 3,
  fail_stuck = 4,
  timeout = 5,
};

inline bool is_failure(Status s) {
  return s == Status::fail_ground || s == Status::fail_orientation || s == Status::fail_stuck;
}
inline bool is_terminal(Status s) { return s != Status::running; }

std::string status_name(Status s);

struct TerminationConfig {
  double pitch_limit = 1.0;        // rad
  double stuck_window = 4.0;       // s
  double stuck_min_progress = 0.05;  // m over the window
  double stuck_x_max = 0.5;        // "near start" bound for the stuck rule
  double max_time = 30.0;          // s
  double contact_tol = 0.005;      // body-point ground-contact tolerance, m
};

/// Rule priority: failures (ground, orientation, stuck) before success before
/// timeout. `progress` holds torso x once per control step, trailing window.
Status check_termination(const PhysicsConfig& phys, const TerminationConfig& cfg,
                         const AgentState& state, const TerrainProfile& profile,
                         const std::deque<double>& progress);

}  // namespace parkour::sim
