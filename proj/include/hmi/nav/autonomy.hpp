#pragma once

#include <cmath>
#include <numbers>

#include "hmi/core/params.hpp"
#include "hmi/nav/planner.hpp"
#include "hmi/nav/profile.hpp"
#include "hmi/sim/grid.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

namespace detail {

// Way out of a tight spot: among 16 headings pick the one whose short probe
// step gains the most clearance (ties towards the path), then rotate onto it
// or creep along it, forwards or backwards, whichever is closer.
inline VelocityCommand escape(const RobotState& state, const OccupancyGrid& grid, double path_heading, double here,
                              double limit, const Params& p) {
  constexpr int kHeadings = 16;
  constexpr double kProbe = 0.15;
  constexpr double kCreep = 0.2;
  constexpr double kAligned = 0.35;
  const Vec2 pos = state.pose.position();
  double best_h = path_heading, best_score = -1e300;
  for (int i = 0; i < kHeadings; ++i) {
    const double h = -std::numbers::pi + 2.0 * std::numbers::pi * i / kHeadings;
    const Vec2 probe{pos.x + kProbe * std::cos(h), pos.y + kProbe * std::sin(h)};
    const double score = clearance(grid, probe, state.radius, limit) - here + 0.01 * std::cos(h - path_heading);
    if (score > best_score) {
      best_score = score;
      best_h = h;
    }
  }
  const double fwd = normalize_angle(best_h - state.pose.theta);
  const double back = normalize_angle(best_h + std::numbers::pi - state.pose.theta);
  const SpeedLimits lim{p.v_max, p.omega_max};
  if (std::abs(fwd) <= kAligned) return VelocityCommand::clamped(kCreep, 2.0 * fwd, Agent::AI, lim);
  if (std::abs(back) <= kAligned) return VelocityCommand::clamped(-kCreep, 2.0 * back, Agent::AI, lim);
  return VelocityCommand::clamped(0.0, std::copysign(p.omega_max, fwd), Agent::AI, lim);
}

}  // namespace detail

// Pure-pursuit tracker for the planned path, driven at the expert planner's
// expected speed. Linear speed is scaled by cos(heading error) and drops to
// zero (turn in place) when the lookahead point is behind the robot.
//
// Safety stop: when clearance is below `safety_clearance` and the command
// would not increase it over the next step, the tracker switches to an
// escape manoeuvre that only turns in place or moves to gain clearance.
inline VelocityCommand autonomy_step(const RobotState& state, const PlannedPath& path, const OccupancyGrid& grid,
                                     const Params& p) {
  const SpeedLimits lim{p.v_max, p.omega_max};
  if (path.empty()) return VelocityCommand::zero(Agent::AI);

  const Vec2 pos = state.pose.position();
  const auto proj = project(path, pos);
  const double v_ref = expected_speed(path, proj.arc, p);
  const Vec2 target = point_at(path, proj.arc + p.lookahead);
  const Vec2 rel = target - pos;

  double linear = 0.0, angular = 0.0;
  if (norm(rel) > 1e-9) {
    const double beta = normalize_angle(std::atan2(rel.y, rel.x) - state.pose.theta);
    const double c = std::cos(beta);
    linear = c > 0.0 ? v_ref * c : 0.0;
    const double v_turn = std::max(linear, 0.25);
    angular = 2.0 * v_turn * std::sin(beta) / std::max(norm(rel), 1e-3);
    if (c <= 0.0) angular = std::copysign(p.omega_max, beta);
  }
  auto cmd = VelocityCommand::clamped(linear, angular, Agent::AI, lim);

  const double limit = state.radius + p.safety_clearance + 1.0;
  const double here = clearance(grid, pos, state.radius, limit);
  if (here < p.safety_clearance) {
    const Vec2 next{pos.x + cmd.linear * std::cos(state.pose.theta) * p.dt,
                    pos.y + cmd.linear * std::sin(state.pose.theta) * p.dt};
    if (cmd.linear != 0.0 && clearance(grid, next, state.radius, limit) <= here)
      return detail::escape(state, grid, std::atan2(rel.y, rel.x), here, limit, p);
  }
  return cmd;
}

}  // namespace hmi
