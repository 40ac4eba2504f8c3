#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmi/control/controllers.hpp"
#include "hmi/core/params.hpp"
#include "hmi/core/rng.hpp"
#include "hmi/harness/world.hpp"
#include "hmi/operators/availability.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

enum class OperatorKind { Compliant, Explorer, ConflictProne };

inline std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Compliant: return "compliant";
    case OperatorKind::Explorer: return "explorer";
    case OperatorKind::ConflictProne: return "conflict-prone";
  }
  return "?";
}

// Scripted operator: a base behaviour, optionally combined with the
// distraction trait ("conflict-prone+distracted"). "distracted" alone is the
// compliant behaviour with distraction.
struct OperatorScript {
  OperatorKind kind = OperatorKind::Compliant;
  bool distracted = false;
  std::optional<AvailabilityTrace> availability;  // replaces the default schedule when set

  std::string name() const {
    if (kind == OperatorKind::Compliant && distracted) return "distracted";
    return std::string(to_string(kind)) + (distracted ? "+distracted" : "");
  }
};

inline OperatorScript parse_operator(std::string_view spec) {
  OperatorScript s;
  bool have_kind = false;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto plus = spec.find('+', pos);
    const auto part = detail::trim(spec.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos));
    std::optional<OperatorKind> k;
    if (part == "compliant") k = OperatorKind::Compliant;
    else if (part == "explorer") k = OperatorKind::Explorer;
    else if (part == "conflict-prone") k = OperatorKind::ConflictProne;
    else if (part == "distracted") s.distracted = true;
    else throw ConfigError("unknown operator kind '" + part + "' (compliant, explorer, distracted, conflict-prone)");
    if (k) {
      if (have_kind) throw ConfigError("operator '" + std::string(spec) + "' combines two base behaviours");
      s.kind = *k;
      have_kind = true;
    }
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  return s;
}

inline AvailabilityModel make_availability(const OperatorScript& s, std::uint64_t trial_seed, const Params& p) {
  if (s.availability) return AvailabilityModel::fixed(*s.availability);
  if (s.distracted) return AvailabilityModel::distraction_schedule(trial_seed, p);
  return AvailabilityModel::always();
}

struct AiSwitchNotice {
  double t = 0.0;
  LOA to = LOA::Autonomy;
};

struct OperatorView {
  double t = 0.0;
  RobotState robot;
  LOA loa = LOA::Teleoperation;
  bool available = true;
  bool bumped = false;  // the last physics step ended in contact
  std::optional<AiSwitchNotice> last_ai_switch;
};

struct OperatorOutput {
  std::optional<VelocityCommand> cmd;  // only while teleoperating
  std::optional<LOA> request;
  bool conflict_report = false;
};

inline constexpr double kOperatorLookahead = 0.4;
inline constexpr double kBackoffTime = 0.6;
inline constexpr double kBackoffSpeed = 0.3;

class ScriptedOperator {
 public:
  ScriptedOperator(OperatorScript script, const World& world, const Params& p, std::uint64_t trial_seed)
      : script_(std::move(script)), p_(p), rng_(make_stream(trial_seed, "operator")) {
    for (const auto& a : world.scenario.aois) aois_.push_back({a.id, a.pois, {}, false});
  }

  const OperatorScript& script() const noexcept { return script_; }
  std::vector<int> visited() const { return visited_; }

  OperatorOutput step(const OperatorView& v, const World& w) {
    OperatorOutput out;
    const bool explores = script_.kind != OperatorKind::Compliant;

    if (script_.kind == OperatorKind::ConflictProne) note_ai_switch(v, out);

    // Unavailable: the last command stays on the input device for a while,
    // then the hands come off it.
    if (!v.available) {
      if (!away_since_) away_since_ = v.t;
      if (v.loa == LOA::Teleoperation)
        out.cmd = v.t - *away_since_ < p_.stale_time ? last_cmd_.value_or(VelocityCommand{}) : VelocityCommand{};
      if (out.cmd) last_cmd_ = *out.cmd;
      return out;
    }
    if (away_since_) {
      away_since_.reset();
      back_at_ = v.t;
    }
    if (back_at_) {
      if (v.t - *back_at_ < p_.reaction_delay) {
        if (v.loa == LOA::Teleoperation) out.cmd = last_cmd_ = VelocityCommand{};
        return out;
      }
      back_at_.reset();
      resumed_ = true;
    }

    const Vec2 pos = v.robot.pose.position();
    if (explores) track_aois(v, w, pos, out);

    if (script_.kind == OperatorKind::ConflictProne && pending_override_ && v.t + 1e-9 >= *pending_override_) {
      pending_override_.reset();
      if (v.loa == LOA::Autonomy && !out.request) out.request = LOA::Teleoperation;
    }

    if (v.loa == LOA::Teleoperation) {
      // After bumping into something, back off briefly before steering again.
      if (v.bumped) backoff_until_ = v.t + kBackoffTime;
      if (backoff_until_ && v.t < *backoff_until_)
        out.cmd = VelocityCommand{-kBackoffSpeed, 0.0, Agent::Human};
      else
        out.cmd = drive(v, w, pos, explores);
      last_cmd_ = *out.cmd;
    }
    return out;
  }

 private:
  struct AoiProgress {
    int id = 0;
    std::vector<int> pois;
    std::vector<int> visited;
    bool done = false;
  };

  void note_ai_switch(const OperatorView& v, OperatorOutput& out) {
    if (!v.last_ai_switch || v.last_ai_switch->to != LOA::Autonomy) return;
    if (seen_switch_ && *seen_switch_ == v.last_ai_switch->t) return;
    seen_switch_ = v.last_ai_switch->t;
    if (!overrides_.empty() && seen_switch_.value() - overrides_.back() <= p_.conflict_window + 1e-9)
      out.conflict_report = true;
    overrides_.push_back(*seen_switch_);
    if (uniform01(rng_) < p_.p_override) pending_override_ = *seen_switch_ + p_.override_delay;
  }

  AoiProgress* current_aoi() {
    for (auto& a : aois_)
      if (!a.done) return &a;
    return nullptr;
  }

  void track_aois(const OperatorView& v, const World& w, Vec2 pos, OperatorOutput& out) {
    const AoiRegion* r = w.region_at(pos);
    const std::optional<int> now = r ? std::optional<int>(r->id) : std::nullopt;
    auto progress = [&](int id) -> AoiProgress* {
      for (auto& a : aois_)
        if (a.id == id) return &a;
      return nullptr;
    };
    if (inside_ && inside_ != now) {
      if (auto* a = progress(*inside_)) a->done = true;
      if (v.loa == LOA::Teleoperation) out.request = LOA::Autonomy;
    }
    if (now && (inside_ != now || resumed_)) {
      auto* a = progress(*now);
      if (a && !a->done && v.loa == LOA::Autonomy) out.request = LOA::Teleoperation;
    }
    inside_ = now;
    resumed_ = false;
  }

  VelocityCommand drive(const OperatorView& v, const World& w, Vec2 pos, bool explores) {
    const DistanceField* field = &w.final_field();
    Vec2 target = w.scenario.final_goal().position;
    double stop_radius = p_.arrival_radius;
    int poi = -1;
    if (explores) {
      while (auto* a = current_aoi()) {
        if (a->visited.size() == a->pois.size()) {
          a->done = true;
          continue;
        }
        poi = a->pois[a->visited.size()];
        field = &w.field_for(poi);
        target = w.scenario.find_goal(poi)->position;
        stop_radius = p_.visit_radius;
        break;
      }
    }

    if (distance(pos, target) < stop_radius) {
      if (poi >= 0) {
        if (!dwell_since_ || dwell_poi_ != poi) {
          dwell_since_ = v.t;
          dwell_poi_ = poi;
        }
        if (v.t - *dwell_since_ + 1e-9 >= p_.dwell) {
          current_aoi()->visited.push_back(poi);
          visited_.push_back(poi);
          dwell_since_.reset();
        }
      }
      return VelocityCommand{};
    }
    dwell_since_.reset();

    Vec2 ahead = field->lookahead(pos, kOperatorLookahead);
    if (distance(pos, target) < kOperatorLookahead) ahead = target;
    const double beta = normalize_angle(std::atan2(ahead.y - pos.y, ahead.x - pos.x) - v.robot.pose.theta);
    // full speed when aligned, turning in place beyond 60 degrees
    const double linear = p_.cruise_speed * std::clamp(2.0 * std::cos(beta) - 1.0, 0.0, 1.0);
    const double angular = p_.heading_gain * beta;
    const double nl = p_.noise_sigma * gaussian(rng_);
    const double na = p_.noise_sigma * gaussian(rng_);
    return VelocityCommand::clamped(linear + nl, angular + na, Agent::Human, {p_.v_max, p_.omega_max});
  }

  OperatorScript script_;
  Params p_;
  Rng rng_;
  std::vector<AoiProgress> aois_;
  std::vector<int> visited_;
  std::optional<int> inside_;
  bool resumed_ = false;
  std::optional<double> away_since_;
  std::optional<double> back_at_;
  std::optional<VelocityCommand> last_cmd_;
  std::optional<double> dwell_since_;
  int dwell_poi_ = -1;
  std::optional<double> seen_switch_;
  std::vector<double> overrides_;
  std::optional<double> pending_override_;
  std::optional<double> backoff_until_;
};

}  // namespace hmi
