#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmi/core/params.hpp"
#include "hmi/nav/planner.hpp"

namespace hmi {

struct PathProjection {
  std::size_t index = 0;  // nearest waypoint
  double arc = 0.0;       // arc position of that waypoint (m)
  double offset = 0.0;    // distance from the query point to it (m)
};

// Nearest waypoint to p; ties go to the earlier waypoint.
inline PathProjection project(const PlannedPath& path, Vec2 p) {
  PathProjection best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const double d = distance(path.waypoints[i], p);
    if (d < best_d) {
      best_d = d;
      best = {i, path.arc[i], d};
    }
  }
  return best;
}

// Point at arc position s, linearly interpolated and clamped to the ends.
inline Vec2 point_at(const PlannedPath& path, double s) {
  if (path.waypoints.empty()) return {};
  if (s <= 0.0) return path.waypoints.front();
  if (s >= path.arc.back()) return path.waypoints.back();
  const auto it = std::upper_bound(path.arc.begin(), path.arc.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - path.arc.begin());
  const std::size_t i = j - 1;
  const double seg = path.arc[j] - path.arc[i];
  const double t = seg > 0.0 ? (s - path.arc[i]) / seg : 0.0;
  return path.waypoints[i] + t * (path.waypoints[j] - path.waypoints[i]);
}

// Speed factor from the turn the path makes within `lookahead` of s:
// 1 on straights, 0.5 at a right-angle turn (or sharper), linear between.
// The turn is the angle between the chords [s, s+L/2] and [s+L/2, s+L],
// which smooths out the 45-degree staircase of grid paths.
inline double curvature_factor(const PlannedPath& path, double s, double lookahead) {
  const double end = path.total_length;
  const double mid = std::min(s + 0.5 * lookahead, end);
  const double far = std::min(s + lookahead, end);
  const Vec2 a = point_at(path, s), b = point_at(path, mid), c = point_at(path, far);
  if (norm(b - a) < 1e-9 || norm(c - b) < 1e-9) return 1.0;
  const double turn = angle_between(b - a, c - b);
  const double half_pi = 0.5 * std::numbers::pi;
  return 1.0 - 0.5 * std::min(turn, half_pi) / half_pi;
}

// Reference speed of the expert planner at arc position s:
// min(v_max, sqrt(2 a_dec d_remaining), v_max * curvature_factor).
inline double expected_speed(const PlannedPath& path, double s, const Params& p) {
  if (path.empty()) return 0.0;
  s = std::clamp(s, 0.0, path.total_length);
  const double remaining = std::max(0.0, path.total_length - s);
  const double braking = std::sqrt(2.0 * p.a_dec * remaining);
  const double turning = p.v_max * curvature_factor(path, s, p.curvature_lookahead);
  return std::clamp(std::min({p.v_max, braking, turning}), 0.0, p.v_max);
}

}  // namespace hmi
