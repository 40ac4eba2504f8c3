#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "hmi/control/controllers.hpp"
#include "hmi/core/error.hpp"
#include "hmi/harness/event_log.hpp"
#include "hmi/harness/trial.hpp"

namespace hmi::gateway {

// Wire protocol: text frames, each one JSON object with a "type" field.
// Client to server: cmd_vel, loa_request, focus, conflict_report, session.
// Server to client: ack, telemetry, event, error.

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CmdVel {
  double linear = 0.0;
  double angular = 0.0;
  std::optional<double> t;  // client send time on the session clock, if given
};

struct LoaRequest {
  LOA target = LOA::Teleoperation;
};

struct Focus {
  bool available = true;
};

struct ConflictReport {};

struct SessionControl {
  enum class Action { Start, Reset };
  Action action = Action::Start;
  std::optional<std::string> scenario;
  std::optional<ControllerKind> controller;
  std::optional<std::uint64_t> seed;
};

using Inbound = std::variant<CmdVel, LoaRequest, Focus, ConflictReport, SessionControl>;

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + name + "'");
  return *it;
}

inline double finite_number(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + name + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProtocolError(std::string("field '") + name + "' must be finite");
  return d;
}

inline std::string text_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

// Parses one client frame. Numeric ranges are not checked here; commands are
// clamped to the speed limits when applied.
inline Inbound parse_inbound(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("frame is not valid JSON");
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  const std::string type = detail::text_field(j, "type");

  if (type == "cmd_vel") {
    CmdVel c{detail::finite_number(j, "linear"), detail::finite_number(j, "angular"), std::nullopt};
    if (j.contains("t")) c.t = detail::finite_number(j, "t");
    return c;
  }
  if (type == "loa_request") {
    const auto target = parse_loa(detail::text_field(j, "target"));
    if (!target) throw ProtocolError("loa_request target must be 'teleoperation' or 'autonomy'");
    return LoaRequest{*target};
  }
  if (type == "focus") {
    const auto& v = detail::field(j, "available");
    if (!v.is_boolean()) throw ProtocolError("field 'available' must be a boolean");
    return Focus{v.get<bool>()};
  }
  if (type == "conflict_report") return ConflictReport{};
  if (type == "session") {
    SessionControl s;
    const std::string action = detail::text_field(j, "action");
    if (action == "start") s.action = SessionControl::Action::Start;
    else if (action == "reset") s.action = SessionControl::Action::Reset;
    else throw ProtocolError("session action must be 'start' or 'reset'");
    if (j.contains("scenario")) s.scenario = detail::text_field(j, "scenario");
    if (j.contains("controller")) {
      s.controller = parse_controller(detail::text_field(j, "controller"));
      if (!s.controller) throw ProtocolError("controller must be 'emics' or 'hieremics'");
    }
    if (j.contains("seed")) {
      const auto& v = j["seed"];
      if (!v.is_number_unsigned()) throw ProtocolError("field 'seed' must be a non-negative integer");
      s.seed = v.get<std::uint64_t>();
    }
    return s;
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

inline std::string error_message(const std::string& what) {
  return ojson{{"type", "error"}, {"message", what}}.dump();
}

inline ojson geometry_json(const World& w) {
  const auto& g = w.scenario.grid;
  ojson occupied = ojson::array();
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      if (g.occupied({x, y})) occupied.push_back({x, y});
  ojson goals = ojson::array();
  for (const auto& goal : w.scenario.goals) {
    ojson o{{"id", goal.id}, {"kind", to_string(goal.kind)}, {"x", goal.position.x}, {"y", goal.position.y}};
    if (goal.aoi) o["aoi"] = *goal.aoi;
    goals.push_back(std::move(o));
  }
  return {{"width", g.width()},
          {"height", g.height()},
          {"resolution", g.resolution()},
          {"occupied", std::move(occupied)},
          {"goals", std::move(goals)},
          {"start", {{"x", w.scenario.start.x}, {"y", w.scenario.start.y}, {"theta", w.scenario.start.theta}}}};
}

inline ojson switch_json(const SwitchEvent& e) {
  return {{"t", e.t},
          {"from", to_string(e.from)},
          {"to", to_string(e.to)},
          {"initiator", to_string(e.initiator)},
          {"reason", e.reason}};
}

inline std::string trial_status(const Trial& trial) {
  if (!trial.ended()) return "running";
  return trial.metrics().completed ? "completed" : "ended";
}

// Path waypoints sent in telemetry are thinned to this spacing.
inline constexpr double kTelemetryPathSpacing = 0.5;

inline ojson telemetry_json(const Trial& trial) {
  const auto& s = trial.robot();
  ojson path = ojson::array();
  const auto& p = trial.path();
  double last_arc = -1.0;
  for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
    const bool last = i + 1 == p.waypoints.size();
    if (!last && last_arc >= 0.0 && p.arc[i] - last_arc < kTelemetryPathSpacing) continue;
    path.push_back({p.waypoints[i].x, p.waypoints[i].y});
    last_arc = p.arc[i];
  }
  const auto& post = trial.posterior();
  ojson posterior = ojson::array();
  for (std::size_t i = 0; i < post.size(); ++i)
    posterior.push_back({{"goal", post.goal_ids[i]}, {"p", post.probabilities[i]}});
  return {{"type", "telemetry"},
          {"t", trial.time()},
          {"pose", {{"x", s.pose.x}, {"y", s.pose.y}, {"theta", s.pose.theta}}},
          {"velocity", {{"linear", s.velocity.linear}, {"angular", s.velocity.angular}}},
          {"loa", to_string(trial.loa())},
          {"path", std::move(path)},
          {"goal", trial.world().scenario.final_goal().id},
          {"intent", {{"top", post.top_goal}, {"p", post.confidence}, {"exploring", trial.exploring_now()},
                      {"posterior", std::move(posterior)}}},
          {"available", trial.available()},
          {"err", trial.controller().error.value()},
          {"last_switch", trial.last_switch() ? switch_json(*trial.last_switch()) : ojson(nullptr)},
          {"status", trial_status(trial)}};
}

inline std::string event_message(const std::string& event, ojson body) {
  ojson j{{"type", "event"}, {"event", event}};
  for (auto& [k, v] : body.items()) j[k] = v;
  return j.dump();
}

}  // namespace hmi::gateway
