#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hmi/control/controllers.hpp"
#include "hmi/harness/event_log.hpp"
#include "hmi/harness/world.hpp"
#include "hmi/intent/boir.hpp"
#include "hmi/metrics/conflicts.hpp"
#include "hmi/metrics/summary.hpp"
#include "hmi/nav/autonomy.hpp"
#include "hmi/nav/profile.hpp"
#include "hmi/operators/operator.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

struct TrialConfig {
  std::string scenario;  // label recorded in the log header (usually the path)
  ControllerKind controller = ControllerKind::HierEmics;
  OperatorScript op;
  std::uint64_t seed = 0;
  Params params;
  LOA initial_loa = LOA::Teleoperation;
  std::string operator_label;  // recorded instead of op.name() when set
};

// What the operator side contributes to one tick.
struct TickInput {
  bool available = true;
  std::optional<VelocityCommand> human_cmd;  // nullopt = no input (zero while teleoperating)
  std::optional<LOA> request;
  bool conflict_report = false;
};

// What happened during one tick, for live consumers.
struct TickOutcome {
  std::vector<SwitchEvent> switches;
  std::optional<CollisionEvent> collision;
  std::vector<int> visits;
  bool conflict_report = false;
  bool ended = false;
};

// Goal-directed speed: the forward speed component along the direction of
// the optimal path to the final goal, never negative.
inline double goal_directed_speed(const RobotState& s, const DistanceField& field, double lookahead) {
  const Vec2 pos = s.pose.position();
  const Vec2 dir = field.lookahead(pos, lookahead) - pos;
  if (norm(dir) < 1e-9) return 0.0;
  const double heading = std::atan2(dir.y, dir.x);
  return std::max(0.0, s.velocity.linear * std::cos(normalize_angle(s.pose.theta - heading)));
}

// One trial's state and its tick loop, minus the operator. The batch runner
// feeds it from a scripted operator, the gateway from a live connection.
//
// Tick order: (1) availability and (2) operator input arrive in TickInput;
// (3) intent update (teleoperation only; decay otherwise); (4) switcher step
// with the AI switch applied; (5) human LOA request, which therefore wins the
// tick; (6) applied command; (7) physics step; (8) log.
class Trial {
 public:
  Trial(std::shared_ptr<const World> world, TrialConfig cfg)
      : world_(std::move(world)), cfg_(std::move(cfg)), p_(cfg_.params) {
    state_.pose = world_->scenario.start;
    state_.radius = p_.robot_radius;
    cs_ = ControllerState::initial(cfg_.initial_loa, p_);
    posterior_ = prior_posterior(world_->hypotheses);
    intent_every_ = std::max<long>(1, std::lround(1.0 / (p_.intent_rate * p_.dt)));
    path_ = world_->final_field().path_from(state_.pose.position());
    metrics_.seed = cfg_.seed;

    log_.write({{"type", "header"},
                {"version", 1},
                {"scenario", cfg_.scenario},
                {"controller", to_string(cfg_.controller)},
                {"operator", cfg_.operator_label.empty() ? cfg_.op.name() : cfg_.operator_label},
                {"seed", cfg_.seed},
                {"initial_loa", to_string(cfg_.initial_loa)},
                {"params", params_json(p_)}});
  }

  TickOutcome tick(const TickInput& in) {
    TickOutcome out;
    if (ended_) {
      out.ended = true;
      return out;
    }
    const double t = tick_time(k_);
    const double t_next = tick_time(k_ + 1);
    available_ = in.available;
    const Vec2 pos = state_.pose.position();

    // (3) intent
    const VelocityCommand human = in.human_cmd.value_or(VelocityCommand{});
    if (cs_.loa == LOA::Teleoperation) {
      if (k_ % intent_every_ == 0)
        posterior_ = update(posterior_, observe(state_, human, world_->hypotheses, world_->fields), p_);
    } else {
      posterior_ = decay(posterior_, p_.gamma);
    }
    exploring_ = exploring(posterior_, world_->hypotheses, p_.theta_intent);

    // (4) switcher
    path_ = world_->final_field().path_from(pos);
    v_expected_ = expected_speed(path_, project(path_, pos).arc, p_);
    v_actual_ = goal_directed_speed(state_, world_->final_field(), p_.lookahead);
    cs_.error.update(v_actual_, v_expected_);
    const LOA before = cs_.loa;
    const bool input_active = std::abs(human.linear) > kHeadingSpeedThreshold || std::abs(human.angular) > kHeadingSpeedThreshold;
    decision_ = cfg_.controller == ControllerKind::Emics
                    ? emics_step(cs_, p_.dt, p_)
                    : hieremics_step(cs_, {in.available, exploring_, input_active}, p_.dt, p_, world_->tier_order);
    if (decision_.is_switch()) record_switch(out, {t, before, cs_.loa, Agent::AI, decision_.reason});

    // (5) human request
    if (in.request) {
      const LOA prev = cs_.loa;
      if (human_switch(cs_, *in.request, p_)) record_switch(out, {t, prev, cs_.loa, Agent::Human, "human"});
    }
    if (in.conflict_report) {
      out.conflict_report = true;
      ++metrics_.conflict_reports;
      log_.write({{"type", "conflict_report"}, {"t", t}});
    }

    // (6) applied command
    if (cs_.loa == LOA::Teleoperation) {
      applied_ = cs_.gate_teleop_input ? VelocityCommand::zero(Agent::Human) : human;
      applied_.source = Agent::Human;
    } else {
      applied_ = autonomy_step(state_, path_, world_->scenario.grid, p_);
    }
    applied_ = VelocityCommand::clamped(applied_.linear, applied_.angular, applied_.source, world_->scenario.limits());

    // (7) physics
    const auto res = step(state_, applied_, world_->scenario.grid, p_.dt, t_next, world_->scenario.limits(),
                          p_.collision_debounce);
    state_ = res.state;
    contact_ = res.contact;
    ++k_;
    if (res.collision) {
      out.collision = res.collision;
      ++metrics_.collisions;
      log_.write(collision_record(*res.collision));
    }
    for (const auto& g : world_->scenario.goals) {
      if (g.kind != GoalKind::POI || std::find(visited_.begin(), visited_.end(), g.id) != visited_.end()) continue;
      if (distance(state_.pose.position(), g.position) <= p_.visit_radius) {
        visited_.push_back(g.id);
        out.visits.push_back(g.id);
        ++metrics_.pois_visited;
        log_.write({{"type", "visit"}, {"t", t_next}, {"goal", g.id}});
      }
    }

    // (8) log
    log_.write({{"type", "tick"},
                {"t", t_next},
                {"x", state_.pose.x},
                {"y", state_.pose.y},
                {"theta", state_.pose.theta},
                {"loa", to_string(cs_.loa)},
                {"err", cs_.error.value()},
                {"avail", in.available},
                {"intent", {{"goal", posterior_.top_goal}, {"p", posterior_.confidence}}},
                {"cmd", {{"source", to_string(applied_.source)}, {"linear", applied_.linear}, {"angular", applied_.angular}}},
                {"decision", label(decision_)}});

    const bool arrived = distance(state_.pose.position(), world_->scenario.final_goal().position) <= p_.arrival_radius;
    if (arrived || t_next >= p_.t_max - 1e-9) finish(arrived, arrived ? t_next : p_.t_max);
    out.ended = ended_;
    return out;
  }

  // Ends the trial early (live session closed); counts as not completed.
  void abort() {
    if (!ended_) finish(false, time());
  }

  bool ended() const noexcept { return ended_; }
  double time() const noexcept { return tick_time(k_); }
  long ticks() const noexcept { return k_; }
  const RobotState& robot() const noexcept { return state_; }
  LOA loa() const noexcept { return cs_.loa; }
  const ControllerState& controller() const noexcept { return cs_; }
  const IntentPosterior& posterior() const noexcept { return posterior_; }
  const PlannedPath& path() const noexcept { return path_; }
  const std::optional<SwitchEvent>& last_switch() const noexcept { return last_switch_; }
  std::optional<AiSwitchNotice> last_ai_switch() const { return last_ai_switch_; }
  const VelocityCommand& applied() const noexcept { return applied_; }
  const SwitchDecision& decision() const noexcept { return decision_; }
  bool available() const noexcept { return available_; }
  bool contact() const noexcept { return contact_; }
  bool exploring_now() const noexcept { return exploring_; }
  const TrialMetrics& metrics() const noexcept { return metrics_; }
  const std::vector<SwitchEvent>& switches() const noexcept { return switches_; }
  const EventLog& log() const noexcept { return log_; }
  std::string release_log() { return log_.release(); }
  const World& world() const noexcept { return *world_; }
  const Params& params() const noexcept { return p_; }

 private:
  // k * dt rounded to the nanosecond, so logged times read 46.55 rather than
  // 46.550000000000004.
  double tick_time(long k) const { return std::round(static_cast<double>(k) * p_.dt * 1e9) / 1e9; }

  void record_switch(TickOutcome& out, SwitchEvent e) {
    log_.write(switch_record(e));
    ++metrics_.total_switches;
    if (e.initiator == Agent::AI) {
      ++metrics_.ai_switches;
      last_ai_switch_ = AiSwitchNotice{e.t, e.to};
    }
    last_switch_ = e;
    out.switches.push_back(e);
    switches_.push_back(std::move(e));
  }

  void finish(bool completed, double end_time) {
    ended_ = true;
    metrics_.completed = completed;
    metrics_.time_to_completion = end_time;
    metrics_.conflicts = static_cast<int>(detect_conflicts(switches_, p_.conflict_window).size());
    log_.write({{"type", "trial_end"},
                {"t", std::max(end_time, time())},
                {"completed", completed},
                {"metrics", to_json(metrics_)}});
  }

  std::shared_ptr<const World> world_;
  TrialConfig cfg_;
  Params p_;
  RobotState state_;
  ControllerState cs_;
  IntentPosterior posterior_;
  long intent_every_ = 4;
  PlannedPath path_;
  long k_ = 0;
  bool ended_ = false;
  bool available_ = true;
  bool contact_ = false;
  bool exploring_ = false;
  double v_expected_ = 0.0;
  double v_actual_ = 0.0;
  SwitchDecision decision_;
  VelocityCommand applied_;
  std::optional<SwitchEvent> last_switch_;
  std::optional<AiSwitchNotice> last_ai_switch_;
  std::vector<SwitchEvent> switches_;
  std::vector<int> visited_;
  TrialMetrics metrics_;
  EventLog log_;
};

inline constexpr double kDrivingSpeed = 0.3;

struct TrialResult {
  TrialMetrics metrics;
  std::string log;
};

// Runs one trial against a scripted operator to completion or t_max.
inline TrialResult run_trial(std::shared_ptr<const World> world, const TrialConfig& cfg) {
  Trial trial(world, cfg);
  ScriptedOperator op(cfg.op, *world, cfg.params, cfg.seed);
  auto avail = make_availability(cfg.op, cfg.seed, cfg.params);
  while (!trial.ended()) {
    OperatorView view;
    view.t = trial.time();
    view.robot = trial.robot();
    view.loa = trial.loa();
    const bool driving = view.loa == LOA::Teleoperation && std::abs(view.robot.velocity.linear) > kDrivingSpeed;
    view.available = avail.sample(view.t, view.robot.pose.position(), driving, *world);
    view.bumped = trial.contact();
    view.last_ai_switch = trial.last_ai_switch();
    const auto o = op.step(view, *world);
    trial.tick({view.available, o.cmd, o.request, o.conflict_report});
  }
  return {trial.metrics(), trial.release_log()};
}

}  // namespace hmi
