#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hmi/gateway/protocol.hpp"
#include "hmi/harness/trial.hpp"

namespace hmi::gateway {

inline constexpr double kStaleInput = 0.5;    // seconds
inline constexpr double kTelemetryRate = 10;  // Hz

struct SessionConfig {
  std::string scenario;  // label; a session{start} naming another scenario is refused
  ControllerKind controller = ControllerKind::HierEmics;
  std::uint64_t seed = 1;
  Params params;
};

// One live operator session, independent of any transport. The transport
// hands every inbound frame to receive() and calls advance() once per tick;
// both return the frames to send back, in order. Inbound messages other than
// session control are queued and only take effect at the next tick, so state
// changes happen at tick boundaries. Focus messages are the availability
// signal; no scripted trace is involved.
class Session {
 public:
  using LogSink = std::function<void(const std::string& log)>;

  Session(std::shared_ptr<const World> world, SessionConfig cfg, LogSink sink = {})
      : world_(std::move(world)), cfg_(std::move(cfg)), sink_(std::move(sink)) {
    telemetry_every_ = std::max<long>(1, std::lround(1.0 / (kTelemetryRate * cfg_.params.dt)));
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  ~Session() { abort(); }

  // `now` is the receipt time on the session clock; defaults to the current
  // trial time.
  std::vector<std::string> receive(const std::string& frame, std::optional<double> now = std::nullopt) {
    Inbound msg;
    try {
      msg = parse_inbound(frame);
    } catch (const ProtocolError& e) {
      return {error_message(e.what())};
    }
    if (auto* s = std::get_if<SessionControl>(&msg)) return control(*s);
    if (!trial_) return {error_message("send session{start} first")};
    if (trial_->ended()) return {};
    queue_.push_back({std::move(msg), now.value_or(trial_->time())});
    return {};
  }

  std::vector<std::string> advance() {
    std::vector<std::string> out;
    if (!trial_ || trial_->ended()) return out;
    const double t = trial_->time();

    TickInput in;
    for (auto& q : queue_) {
      if (auto* c = std::get_if<CmdVel>(&q.msg)) {
        const double sent = c->t.value_or(q.received);
        if (t - sent > kStaleInput + 1e-9) continue;
        held_ = VelocityCommand{c->linear, c->angular, Agent::Human};
        held_at_ = sent;
      } else if (auto* r = std::get_if<LoaRequest>(&q.msg)) {
        in.request = r->target;
      } else if (auto* f = std::get_if<Focus>(&q.msg)) {
        available_ = f->available;
      } else if (std::holds_alternative<ConflictReport>(q.msg)) {
        in.conflict_report = true;
      }
    }
    queue_.clear();
    in.available = available_;
    // no fresh cmd_vel for longer than the stale window counts as zero input
    if (held_ && t - held_at_ <= kStaleInput + 1e-9) in.human_cmd = held_;

    const auto res = trial_->tick(in);
    for (const auto& e : res.switches) out.push_back(event_message("switch", switch_json(e)));
    if (res.collision)
      out.push_back(event_message("collision",
                                  {{"t", res.collision->time}, {"x", res.collision->pose.x}, {"y", res.collision->pose.y}}));
    if (res.conflict_report) out.push_back(event_message("conflict_report", {{"t", t}}));
    if (!res.switches.empty()) {
      const auto eps = detect_conflicts(trial_->switches(), trial_->params().conflict_window);
      if (eps.size() > conflicts_) {
        const auto& ep = eps.back();
        out.push_back(event_message("conflict", {{"t", ep.t_end}, {"t_start", ep.t_start}, {"length", ep.length}}));
      }
      conflicts_ = eps.size();
    }
    for (int id : res.visits) out.push_back(event_message("visit", {{"t", trial_->time()}, {"goal", id}}));
    if (trial_->ticks() % telemetry_every_ == 0 || res.ended) out.push_back(telemetry_json(*trial_).dump());
    if (res.ended) {
      out.push_back(event_message("trial_end", {{"t", trial_->time()},
                                                {"completed", trial_->metrics().completed},
                                                {"metrics", to_json(trial_->metrics())}}));
      flush_log();
    }
    return out;
  }

  // Ends the running trial, if any, as not completed and hands its log on.
  void abort() {
    if (!trial_) return;
    trial_->abort();
    flush_log();
  }

  bool started() const noexcept { return trial_ != nullptr; }
  bool running() const noexcept { return trial_ && !trial_->ended(); }
  const Trial* trial() const noexcept { return trial_.get(); }
  std::size_t queued() const noexcept { return queue_.size(); }
  const SessionConfig& config() const noexcept { return cfg_; }
  double tick_period() const noexcept { return cfg_.params.dt; }

 private:
  struct Queued {
    Inbound msg;
    double received = 0.0;
  };

  std::vector<std::string> control(const SessionControl& s) {
    if (s.scenario && *s.scenario != cfg_.scenario)
      return {error_message("this server runs scenario '" + cfg_.scenario + "'")};
    if (s.action == SessionControl::Action::Start && trial_)
      return {error_message("session already started; use session{reset}")};
    if (s.action == SessionControl::Action::Reset && !trial_) return {error_message("send session{start} first")};
    if (s.controller) cfg_.controller = *s.controller;
    if (s.seed) cfg_.seed = *s.seed;

    abort();
    const bool first = !trial_;
    TrialConfig tc;
    tc.scenario = cfg_.scenario;
    tc.controller = cfg_.controller;
    tc.operator_label = "live";
    tc.seed = cfg_.seed;
    tc.params = cfg_.params;
    trial_ = std::make_unique<Trial>(world_, tc);
    queue_.clear();
    held_.reset();
    available_ = true;
    conflicts_ = 0;
    log_flushed_ = false;

    ojson ack{{"type", "ack"},
              {"action", s.action == SessionControl::Action::Start ? "start" : "reset"},
              {"scenario", cfg_.scenario},
              {"controller", to_string(cfg_.controller)},
              {"seed", cfg_.seed},
              {"dt", cfg_.params.dt},
              {"telemetry_hz", kTelemetryRate}};
    if (first) ack["geometry"] = geometry_json(*world_);
    return {ack.dump()};
  }

  void flush_log() {
    if (log_flushed_ || !trial_ || !trial_->ended()) return;
    log_flushed_ = true;
    if (sink_) sink_(trial_->log().text());
  }

  std::shared_ptr<const World> world_;
  SessionConfig cfg_;
  LogSink sink_;
  std::unique_ptr<Trial> trial_;
  std::deque<Queued> queue_;
  std::optional<VelocityCommand> held_;
  double held_at_ = 0.0;
  bool available_ = true;
  std::size_t conflicts_ = 0;
  long telemetry_every_ = 2;
  bool log_flushed_ = false;
};

}  // namespace hmi::gateway
