#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hmi/ahp/ahp.hpp"
#include "hmi/control/motion_error.hpp"
#include "hmi/core/error.hpp"
#include "hmi/core/params.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

enum class LOA { Teleoperation, Autonomy };

inline std::string_view to_string(LOA l) { return l == LOA::Teleoperation ? "teleoperation" : "autonomy"; }
inline LOA other(LOA l) { return l == LOA::Teleoperation ? LOA::Autonomy : LOA::Teleoperation; }
inline std::optional<LOA> parse_loa(std::string_view s) {
  if (s == "teleoperation") return LOA::Teleoperation;
  if (s == "autonomy") return LOA::Autonomy;
  return std::nullopt;
}

enum class ControllerKind { Emics, HierEmics };

inline std::string_view to_string(ControllerKind k) { return k == ControllerKind::Emics ? "emics" : "hieremics"; }
inline std::optional<ControllerKind> parse_controller(std::string_view s) {
  if (s == "emics") return ControllerKind::Emics;
  if (s == "hieremics") return ControllerKind::HierEmics;
  return std::nullopt;
}

// Rule tiers of the hierarchical switcher, named as in the criticality
// matrix data file.
enum class Tier { Safety, ConflictReduction, Performance };
using TierOrder = std::array<Tier, 3>;

inline constexpr TierOrder kDefaultTierOrder = {Tier::Safety, Tier::ConflictReduction, Tier::Performance};
inline const std::vector<std::string> kTierNames = {"safety", "conflict-reduction", "performance"};

// Orders the tiers from the criticality matrix over
// (safety, conflict-reduction, performance).
inline TierOrder tier_order_from(const ahp::PairwiseMatrix& m) {
  const auto ranked = ahp::rank_tiers(kTierNames, m);
  TierOrder order{};
  for (std::size_t i = 0; i < ranked.size(); ++i) order[i] = static_cast<Tier>(ranked[i].input_index);
  return order;
}

struct SwitchDecision {
  enum class Kind { NoOp, Switch, Inhibit };
  Kind kind = Kind::NoOp;
  LOA target = LOA::Teleoperation;
  Agent initiator = Agent::AI;
  std::string reason;  // rule id; empty when no rule fired

  static SwitchDecision noop(std::string reason = {}) { return {Kind::NoOp, LOA::Teleoperation, Agent::AI, std::move(reason)}; }
  static SwitchDecision inhibit(std::string reason) { return {Kind::Inhibit, LOA::Teleoperation, Agent::AI, std::move(reason)}; }
  static SwitchDecision switch_to(LOA target, std::string reason) { return {Kind::Switch, target, Agent::AI, std::move(reason)}; }

  bool is_switch() const { return kind == Kind::Switch; }
  friend bool operator==(const SwitchDecision&, const SwitchDecision&) = default;
};

// Compact label for decision logs: "noop", "switch:<reason>", "inhibit:<reason>".
inline std::string label(const SwitchDecision& d) {
  switch (d.kind) {
    case SwitchDecision::Kind::NoOp: return d.reason.empty() ? "noop" : "noop:" + d.reason;
    case SwitchDecision::Kind::Switch: return "switch:" + d.reason;
    case SwitchDecision::Kind::Inhibit: return "inhibit:" + d.reason;
  }
  return "?";
}

struct ControllerState {
  LOA loa = LOA::Teleoperation;
  MotionErrorEstimator error;
  double cooldown_remaining = 0.0;
  double grace_remaining = 0.0;
  double high_time = 0.0;  // how long membership_high has stayed above the firing threshold
  bool gate_teleop_input = false;

  static ControllerState initial(LOA loa, const Params& p) {
    ControllerState cs;
    cs.loa = loa;
    cs.error = MotionErrorEstimator(p.error_window, p.dt, p.v_max);
    return cs;
  }
};

namespace detail {

inline constexpr double kTimeEps = 1e-9;

inline void tick_timers(ControllerState& cs, double dt) {
  cs.cooldown_remaining = std::max(0.0, cs.cooldown_remaining - dt);
  cs.grace_remaining = std::max(0.0, cs.grace_remaining - dt);
}

inline void track_high(ControllerState& cs, double dt, const Params& p) {
  if (membership_high(cs.error.value()) > p.firing_threshold)
    cs.high_time += dt;
  else
    cs.high_time = 0.0;
}

inline SwitchDecision ai_switch(ControllerState& cs, LOA target, std::string reason, const Params& p) {
  cs.loa = target;
  cs.cooldown_remaining = p.cooldown;
  cs.high_time = 0.0;
  return SwitchDecision::switch_to(target, std::move(reason));
}

// The performance rule shared by both switchers: sustained High error hands
// control to the other agent once the cooldown has expired.
inline std::optional<SwitchDecision> performance_rule(ControllerState& cs, const Params& p) {
  if (cs.high_time + kTimeEps >= p.trigger_time && cs.cooldown_remaining <= 0.0)
    return ai_switch(cs, other(cs.loa), "performance", p);
  return std::nullopt;
}

}  // namespace detail

// Baseline switcher. Expects cs.error to have been updated this tick.
inline SwitchDecision emics_step(ControllerState& cs, double dt, const Params& p) {
  detail::tick_timers(cs, dt);
  cs.gate_teleop_input = false;
  detail::track_high(cs, dt, p);
  if (auto d = detail::performance_rule(cs, p)) return *d;
  return SwitchDecision::noop();
}

struct HierInputs {
  bool available = true;
  bool exploring = false;
  bool human_input_active = false;
};

// Hierarchical switcher: tiers are tried in criticality order and the first
// one whose antecedent holds decides the tick.
//
//   safety              operator unavailable while teleoperating and either
//                       driving or performing badly -> AI takes over
//   conflict-reduction  operator exploring a POI, or inside the respect
//                       window after their own switch -> AI inhibits itself
//   performance         as in the baseline switcher
//
// Teleoperation input is gated whenever the operator is unavailable.
inline SwitchDecision hieremics_step(ControllerState& cs, const HierInputs& in, double dt, const Params& p,
                                     const TierOrder& order = kDefaultTierOrder) {
  detail::tick_timers(cs, dt);
  cs.gate_teleop_input = !in.available;
  detail::track_high(cs, dt, p);
  const bool high_now = membership_high(cs.error.value()) > p.firing_threshold;

  for (Tier tier : order) {
    switch (tier) {
      case Tier::Safety:
        if (!in.available && cs.loa == LOA::Teleoperation && (in.human_input_active || high_now)) {
          if (cs.cooldown_remaining <= 0.0) return detail::ai_switch(cs, LOA::Autonomy, "safety", p);
          return SwitchDecision::noop("safety");
        }
        break;
      case Tier::ConflictReduction:
        if ((cs.loa == LOA::Teleoperation && in.exploring) || cs.grace_remaining > 0.0) {
          cs.error.reset();
          cs.high_time = 0.0;
          return SwitchDecision::inhibit(cs.grace_remaining > 0.0 && !(cs.loa == LOA::Teleoperation && in.exploring)
                                             ? "respect"
                                             : "exploring");
        }
        break;
      case Tier::Performance:
        if (auto d = detail::performance_rule(cs, p)) return *d;
        break;
    }
  }
  return SwitchDecision::noop();
}

// Operator-initiated switch: always honoured immediately. Returns false for
// a request to the current LOA (nothing happens, nothing is logged).
inline bool human_switch(ControllerState& cs, LOA target, const Params& p) {
  if (target == cs.loa) return false;
  cs.loa = target;
  cs.grace_remaining = p.grace;
  return true;
}

}  // namespace hmi
