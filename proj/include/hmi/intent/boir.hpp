#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hmi/core/params.hpp"
#include "hmi/nav/planner.hpp"
#include "hmi/sim/robot.hpp"
#include "hmi/sim/scenario.hpp"

namespace hmi {

// Bayesian recognition of the operator's navigational goal from the planner
// path distance to each candidate goal and the misalignment between the
// robot's heading and the first leg of the optimal path to it.

struct GoalHypothesis {
  int goal_id = 0;
  Vec2 position;
  GoalKind kind = GoalKind::POI;
  double prior = 0.0;
};

struct IntentObservation {
  std::vector<double> distance;      // metres, +inf when unreachable
  std::vector<double> misalignment;  // radians in [0, pi]
};

struct IntentPosterior {
  std::vector<double> probabilities;  // aligned with the hypothesis set
  std::vector<int> goal_ids;
  int top_goal = 0;
  double confidence = 0.0;
  bool reset = false;  // set when the last update had no likelihood mass

  std::size_t size() const { return probabilities.size(); }
};

inline constexpr double kUninformativeAngle = std::numbers::pi / 2.0;
inline constexpr double kHeadingSpeedThreshold = 0.05;

// Recomputes top_goal/confidence: the largest entry, ties to the lowest id.
inline void refresh_top(IntentPosterior& post) {
  post.confidence = 0.0;
  post.top_goal = 0;
  bool first = true;
  for (std::size_t i = 0; i < post.size(); ++i) {
    const double p = post.probabilities[i];
    const int id = post.goal_ids[i];
    if (first || p > post.confidence || (p == post.confidence && id < post.top_goal)) {
      post.confidence = p;
      post.top_goal = id;
      first = false;
    }
  }
}

inline std::vector<GoalHypothesis> hypotheses_from(const Scenario& sc) {
  std::vector<GoalHypothesis> hs;
  for (const auto& g : sc.goals) hs.push_back({g.id, g.position, g.kind, 0.0});
  const double u = hs.empty() ? 0.0 : 1.0 / static_cast<double>(hs.size());
  for (auto& h : hs) h.prior = u;
  return hs;
}

inline IntentPosterior prior_posterior(std::span<const GoalHypothesis> hs) {
  IntentPosterior post;
  for (const auto& h : hs) {
    post.probabilities.push_back(h.prior);
    post.goal_ids.push_back(h.goal_id);
  }
  const double sum = std::accumulate(post.probabilities.begin(), post.probabilities.end(), 0.0);
  if (!(sum > 0.0)) throw std::invalid_argument("hypothesis priors must have positive mass");
  for (auto& p : post.probabilities) p /= sum;
  refresh_top(post);
  return post;
}

inline IntentPosterior uniform_posterior(std::span<const GoalHypothesis> hs) {
  IntentPosterior post;
  const double u = hs.empty() ? 0.0 : 1.0 / static_cast<double>(hs.size());
  for (const auto& h : hs) {
    post.probabilities.push_back(u);
    post.goal_ids.push_back(h.goal_id);
  }
  refresh_top(post);
  return post;
}

// `fields[i]` is the distance field rooted at hypothesis i. Misalignment is
// measured against the robot heading when the last human command moved the
// robot (|v| > 0.05 m/s); otherwise every angle is the uninformative pi/2.
inline IntentObservation observe(const RobotState& state, const VelocityCommand& last_human_cmd,
                                 std::span<const GoalHypothesis> hs, std::span<const DistanceField> fields,
                                 double heading_lookahead = 0.5) {
  if (hs.size() != fields.size()) throw std::invalid_argument("one distance field per hypothesis required");
  IntentObservation obs;
  const Vec2 pos = state.pose.position();
  const bool moving = std::abs(last_human_cmd.linear) > kHeadingSpeedThreshold;
  const Vec2 heading{std::cos(state.pose.theta), std::sin(state.pose.theta)};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double d = fields[i].distance_from(pos);
    obs.distance.push_back(d);
    if (!std::isfinite(d)) {
      obs.misalignment.push_back(std::numbers::pi);
    } else if (!moving) {
      obs.misalignment.push_back(kUninformativeAngle);
    } else {
      const Vec2 ahead = fields[i].lookahead(pos, heading_lookahead);
      const Vec2 dir = ahead - pos;
      obs.misalignment.push_back(norm(dir) < 1e-9 ? 0.0 : angle_between(heading, dir));
    }
  }
  return obs;
}

// One recursive Bayes step. The prior is first blended towards uniform,
// p~_i = gamma p_i + (1 - gamma)/N, then weighted by
// L_i = exp(-lambda_d d_i) exp(-lambda_alpha alpha_i) and renormalised.
// Computed in log space so distant goals never underflow the whole mass.
inline IntentPosterior update(const IntentPosterior& post, const IntentObservation& obs, const Params& p) {
  const std::size_t n = post.size();
  if (obs.distance.size() != n || obs.misalignment.size() != n)
    throw std::invalid_argument("observation does not match hypothesis set");
  IntentPosterior out = post;
  out.reset = false;
  if (n == 0) return out;

  std::vector<double> logw(n, -std::numeric_limits<double>::infinity());
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double blended = p.gamma * post.probabilities[i] + (1.0 - p.gamma) / static_cast<double>(n);
    if (!(blended > 0.0) || !std::isfinite(obs.distance[i])) continue;
    logw[i] = std::log(blended) - p.lambda_d * obs.distance[i] - p.lambda_alpha * obs.misalignment[i];
    max_logw = std::max(max_logw, logw[i]);
  }
  if (!std::isfinite(max_logw)) {
    std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0 / static_cast<double>(n));
    out.reset = true;
    refresh_top(out);
    return out;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.probabilities[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - max_logw) : 0.0;
    sum += out.probabilities[i];
  }
  for (auto& v : out.probabilities) v /= sum;
  refresh_top(out);
  return out;
}

// Drift towards uniform without evidence (used while the AI is driving).
inline IntentPosterior decay(const IntentPosterior& post, double gamma) {
  IntentPosterior out = post;
  const double n = static_cast<double>(post.size());
  for (auto& v : out.probabilities) v = gamma * v + (1.0 - gamma) / n;
  refresh_top(out);
  return out;
}

// True when the most likely goal is a POI held with at least theta_intent.
inline bool exploring(const IntentPosterior& post, std::span<const GoalHypothesis> hs, double theta_intent) {
  if (post.size() == 0 || post.confidence < theta_intent) return false;
  for (const auto& h : hs)
    if (h.goal_id == post.top_goal) return h.kind == GoalKind::POI;
  return false;
}

}  // namespace hmi
