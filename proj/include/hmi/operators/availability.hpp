#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hmi/core/error.hpp"
#include "hmi/core/params.hpp"
#include "hmi/core/rng.hpp"
#include "hmi/harness/world.hpp"

namespace hmi {

struct AvailabilityInterval {
  double start = 0.0;
  double end = 0.0;  // exclusive
  bool available = true;
  friend bool operator==(const AvailabilityInterval&, const AvailabilityInterval&) = default;
};

// Piecewise-constant availability over half-open intervals [start, end).
// Times not covered by any interval count as available.
class AvailabilityTrace {
 public:
  AvailabilityTrace() = default;
  explicit AvailabilityTrace(std::vector<AvailabilityInterval> intervals) {
    for (const auto& iv : intervals) append(iv);
  }

  void append(const AvailabilityInterval& iv) {
    if (!(iv.start >= 0.0) || !(iv.end > iv.start))
      throw ConfigError("availability interval must satisfy 0 <= start < end");
    if (!intervals_.empty() && iv.start < intervals_.back().end)
      throw ConfigError("availability intervals must be sorted and non-overlapping");
    intervals_.push_back(iv);
  }

  const std::vector<AvailabilityInterval>& intervals() const noexcept { return intervals_; }
  bool empty() const noexcept { return intervals_.empty(); }

 private:
  std::vector<AvailabilityInterval> intervals_;
};

inline bool sample_availability(const AvailabilityTrace& trace, double t) {
  const auto& iv = trace.intervals();
  auto it = std::upper_bound(iv.begin(), iv.end(), t,
                             [](double v, const AvailabilityInterval& x) { return v < x.start; });
  if (it == iv.begin()) return true;
  --it;
  return t < it->end ? it->available : true;
}

// "0-10:1,10-25:0" -> [(0,10,true), (10,25,false)]
inline AvailabilityTrace parse_availability(const std::string& text) {
  AvailabilityTrace trace;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    const auto colon = item.find(':');
    if (dash == std::string::npos || colon == std::string::npos || colon < dash)
      throw ConfigError("availability: expected start-end:0|1, got '" + item + "'");
    const double a = parse_number(item.substr(0, dash), "availability");
    const double b = parse_number(item.substr(dash + 1, colon - dash - 1), "availability");
    const std::string flag = detail::trim(item.substr(colon + 1));
    if (flag != "0" && flag != "1") throw ConfigError("availability: flag must be 0 or 1 in '" + item + "'");
    trace.append({a, b, flag == "1"});
  }
  return trace;
}

// Availability as the harness sees it during a trial. Either a fixed trace
// or the default distraction schedule: one unavailable episode per AOI. The
// secondary task is prompted a seeded random delay after the robot first
// enters the AOI, at the first moment the operator is driving.
class AvailabilityModel {
 public:
  AvailabilityModel() = default;

  static AvailabilityModel always() { return {}; }

  static AvailabilityModel fixed(AvailabilityTrace trace) {
    AvailabilityModel m;
    m.trace_ = std::move(trace);
    return m;
  }

  static AvailabilityModel distraction_schedule(std::uint64_t seed, const Params& p) {
    AvailabilityModel m;
    m.scheduled_ = true;
    m.rng_ = make_stream(seed, "distraction");
    m.params_ = p;
    return m;
  }

  // `driving`: the operator is teleoperating and the robot is moving.
  bool sample(double t, Vec2 robot, bool driving, const World& w) {
    if (scheduled_) {
      if (const AoiRegion* r = w.region_at(robot);
          r && std::find(seen_.begin(), seen_.end(), r->id) == seen_.end()) {
        seen_.push_back(r->id);
        const double delay = params_.distraction_delay_min +
                             uniform01(rng_) * (params_.distraction_delay_max - params_.distraction_delay_min);
        pending_.push_back(t + delay);
      }
      const bool idle = trace_.empty() || t >= trace_.intervals().back().end;
      if (!pending_.empty() && t >= pending_.front() && driving && idle) {
        pending_.erase(pending_.begin());
        trace_.append({t, t + params_.distraction_length, false});
      }
    }
    return sample_availability(trace_, t);
  }

  const AvailabilityTrace& trace() const noexcept { return trace_; }
  bool scheduled() const noexcept { return scheduled_; }

 private:
  AvailabilityTrace trace_;
  bool scheduled_ = false;
  Rng rng_;
  Params params_;
  std::vector<int> seen_;
  std::vector<double> pending_;  // earliest prompt times, in AOI entry order
};

}  // namespace hmi
