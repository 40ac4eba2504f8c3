#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "hmi/sim/geometry.hpp"
#include "hmi/sim/grid.hpp"

namespace hmi {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  friend constexpr bool operator==(const Pose&, const Pose&) = default;
};

enum class Agent { Human, AI };

inline std::string_view to_string(Agent a) { return a == Agent::Human ? "human" : "ai"; }

struct SpeedLimits {
  double v_max = 1.0;
  double omega_max = 1.5;
};

struct VelocityCommand {
  double linear = 0.0;
  double angular = 0.0;
  Agent source = Agent::Human;

  // Builds a command clamped to the limits; non-finite inputs become zero.
  static VelocityCommand clamped(double linear, double angular, Agent source, SpeedLimits lim) {
    auto fix = [](double v, double m) { return std::isfinite(v) ? std::clamp(v, -m, m) : 0.0; };
    return {fix(linear, lim.v_max), fix(angular, lim.omega_max), source};
  }
  static VelocityCommand zero(Agent source) { return {0.0, 0.0, source}; }

  bool is_zero() const { return linear == 0.0 && angular == 0.0; }
  friend constexpr bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

struct RobotState {
  Pose pose;
  VelocityCommand velocity;  // command applied over the last step
  double radius = 0.3;
  double last_collision = -std::numeric_limits<double>::infinity();
};

struct CollisionEvent {
  double time = 0.0;
  Pose pose;
};

struct StepResult {
  RobotState state;
  std::optional<CollisionEvent> collision;
  bool contact = false;  // true even when the event was debounced away
};

// One forward-Euler unicycle step of length dt ending at sim time `now`.
// A step whose end pose would overlap an occupied cell is cancelled: the
// robot keeps its previous pose with zero velocity. Contacts closer than
// `debounce` seconds to the previously reported one are not reported again.
inline StepResult step(const RobotState& s, VelocityCommand cmd, const OccupancyGrid& grid, double dt,
                       double now, SpeedLimits lim, double debounce = 1.0) {
  cmd = VelocityCommand::clamped(cmd.linear, cmd.angular, cmd.source, lim);
  const double c = std::cos(s.pose.theta), sn = std::sin(s.pose.theta);
  Pose next{s.pose.x + cmd.linear * c * dt, s.pose.y + cmd.linear * sn * dt,
            normalize_angle(s.pose.theta + cmd.angular * dt)};

  StepResult out{s, std::nullopt, false};
  if (disc_collides(grid, next.position(), s.radius)) {
    out.contact = true;
    out.state.velocity = VelocityCommand::zero(cmd.source);
    if (now - s.last_collision >= debounce) {
      out.collision = CollisionEvent{now, s.pose};
      out.state.last_collision = now;
    }
    return out;
  }
  out.state.pose = next;
  out.state.velocity = cmd;
  return out;
}

}  // namespace hmi
