#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmi/core/error.hpp"
#include "hmi/metrics/conflicts.hpp"
#include "hmi/metrics/summary.hpp"

namespace hmi {

class MalformedLog : public ConfigError {
 public:
  explicit MalformedLog(std::size_t line, const std::string& what)
      : ConfigError("log:" + std::to_string(line) + ": " + what) {}
};

struct ReplayResult {
  TrialMetrics recomputed;
  TrialMetrics recorded;
  std::vector<SwitchEvent> switches;
  std::size_t ticks = 0;
  bool matches() const { return recomputed == recorded; }
};

namespace detail {

inline LOA loa_field(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto v = parse_loa(j.at(key).get<std::string>());
  if (!v) throw MalformedLog(line, std::string("bad LOA in '") + key + "'");
  return *v;
}

}  // namespace detail

// Recomputes a trial's metrics from its event log alone and returns them
// next to the metrics recorded in the trial_end record.
inline ReplayResult replay(const std::string& text) {
  ReplayResult out;
  std::istringstream in(text);
  std::string line;
  std::size_t ln = 0;
  bool have_header = false, have_end = false;
  double last_t = -1e300;
  double tau_c = Params{}.conflict_window;

  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    if (have_end) throw MalformedLog(ln, "records after trial_end");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLog(ln, std::string("invalid JSON: ") + e.what());
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw MalformedLog(ln, "first record must be the header");
        have_header = true;
        out.recomputed.seed = j.at("seed").get<std::uint64_t>();
        tau_c = j.at("params").at("conflict_window").get<double>();
        continue;
      }
      const double t = j.at("t").get<double>();
      if (t < last_t) throw MalformedLog(ln, "time goes backwards");
      last_t = t;
      if (type == "tick") {
        ++out.ticks;
      } else if (type == "switch") {
        SwitchEvent e;
        e.t = t;
        e.from = detail::loa_field(j, "from", ln);
        e.to = detail::loa_field(j, "to", ln);
        const auto who = j.at("initiator").get<std::string>();
        if (who != "human" && who != "ai") throw MalformedLog(ln, "bad initiator");
        e.initiator = who == "human" ? Agent::Human : Agent::AI;
        e.reason = j.at("reason").get<std::string>();
        if (e.from == e.to) throw MalformedLog(ln, "switch without LOA change");
        ++out.recomputed.total_switches;
        if (e.initiator == Agent::AI) ++out.recomputed.ai_switches;
        out.switches.push_back(std::move(e));
      } else if (type == "collision") {
        ++out.recomputed.collisions;
      } else if (type == "visit") {
        ++out.recomputed.pois_visited;
      } else if (type == "conflict_report") {
        ++out.recomputed.conflict_reports;
      } else if (type == "trial_end") {
        have_end = true;
        out.recomputed.completed = j.at("completed").get<bool>();
        out.recorded = metrics_from_json(j.at("metrics"));
        out.recomputed.time_to_completion = t;
      } else {
        throw MalformedLog(ln, "unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLog(ln, std::string("missing or mistyped field: ") + e.what());
    }
  }
  if (!have_header) throw MalformedLog(ln, "empty log");
  if (!have_end) throw MalformedLog(ln, "log is truncated (no trial_end record)");
  out.recomputed.conflicts = static_cast<int>(detect_conflicts(out.switches, tau_c).size());
  return out;
}

}  // namespace hmi
