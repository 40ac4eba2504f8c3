#pragma once

#include <string>
#include <vector>

#include "hmi/control/controllers.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

struct SwitchEvent {
  double t = 0.0;
  LOA from = LOA::Teleoperation;
  LOA to = LOA::Autonomy;
  Agent initiator = Agent::AI;
  std::string reason;  // rule id, or "human"

  friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

struct ConflictEpisode {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<SwitchEvent> events;
  int length = 0;  // number of reversals
};

// Conflict for control: one agent undoes the other's switch (to == the
// previous from, opposite initiator) within tau_c of it. Further alternating
// reversals, each within tau_c of the one before, extend the episode.
// Episodes are built greedily from the earliest event so they are maximal and
// never share an event.
inline std::vector<ConflictEpisode> detect_conflicts(const std::vector<SwitchEvent>& log, double tau_c) {
  auto reverses = [&](const SwitchEvent& prev, const SwitchEvent& next) {
    return next.initiator != prev.initiator && next.to == prev.from && next.t - prev.t <= tau_c + 1e-9;
  };
  std::vector<ConflictEpisode> out;
  std::size_t i = 0;
  while (i < log.size()) {
    std::size_t j = i;
    while (j + 1 < log.size() && reverses(log[j], log[j + 1])) ++j;
    if (j > i) {
      ConflictEpisode ep;
      ep.t_start = log[i].t;
      ep.t_end = log[j].t;
      ep.events.assign(log.begin() + static_cast<std::ptrdiff_t>(i), log.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      ep.length = static_cast<int>(j - i);
      out.push_back(std::move(ep));
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace hmi
