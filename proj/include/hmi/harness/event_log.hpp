#pragma once

#include <string>

#include "json.hpp"

#include "hmi/core/params.hpp"
#include "hmi/metrics/conflicts.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

using ojson = nlohmann::ordered_json;

// JSONL event log: one JSON object per line, discriminated by "type".
// Records are serialised with a fixed key order so identical runs produce
// byte-identical logs.
class EventLog {
 public:
  void write(const ojson& record) {
    text_ += record.dump();
    text_ += '\n';
    ++records_;
  }

  const std::string& text() const noexcept { return text_; }
  std::string release() { return std::move(text_); }
  std::size_t records() const noexcept { return records_; }

 private:
  std::string text_;
  std::size_t records_ = 0;
};

inline ojson params_json(const Params& p) {
  ojson j = ojson::object();
  for (const auto& spec : detail::kParamTable) j[std::string(spec.name)] = p.*spec.member;
  return j;
}

inline ojson switch_record(const SwitchEvent& e) {
  return {{"type", "switch"},
          {"t", e.t},
          {"from", to_string(e.from)},
          {"to", to_string(e.to)},
          {"initiator", to_string(e.initiator)},
          {"reason", e.reason}};
}

inline ojson collision_record(const CollisionEvent& c) {
  return {{"type", "collision"}, {"t", c.time}, {"x", c.pose.x}, {"y", c.pose.y}};
}

}  // namespace hmi
