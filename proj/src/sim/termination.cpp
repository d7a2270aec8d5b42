#include "sim/termination.hpp"

namespace parkour::sim {

std::string status_name(Status s) {
  switch (s) {
    case Status::running: return "running";
    case Status::success: return "success";
    case Status::fail_ground: return "fail_ground";
    case Status::fail_orientation: return "fail_orientation";
    case Status::fail_stuck: return "fail_stuck";
    case Status::timeout: return "timeout";
  }
  return "unknown";
}

Status check_termination(const PhysicsConfig& phys, const TerminationConfig& cfg,
                         const AgentState& state, const TerrainProfile& profile,
                         const std::deque<double>& progress) {
  if (!state.finite()) return Status::fail_ground;  // faults are failures

  for (const Vec2& p : body_points(phys, state)) {
    if (profile.masked(p.x()) && p.y() <= profile.height(p.x()) + cfg.contact_tol)
      return Status::fail_ground;
  }
  if (std::abs(state.theta) > cfg.pitch_limit) return Status::fail_orientation;

  // stuck: a full trailing window with less than the minimum progress, while
  // still near the start
  if (!progress.empty() && state.time >= cfg.stuck_window &&
      state.x - progress.front() < cfg.stuck_min_progress && state.x < cfg.stuck_x_max)
    return Status::fail_stuck;

  if (state.x >= profile.goal_x && foot_pos(phys, state, 0).x() >= profile.end_min_x &&
      foot_pos(phys, state, 1).x() >= profile.end_min_x)
    return Status::success;

  if (state.time >= cfg.max_time - 1e-9) return Status::timeout;
  return Status::running;
}

}  // namespace parkour::sim
