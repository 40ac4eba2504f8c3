#pragma once

#include <memory>
#include <vector>

#include "hmi/control/controllers.hpp"
#include "hmi/intent/boir.hpp"
#include "hmi/nav/planner.hpp"
#include "hmi/sim/scenario.hpp"

namespace hmi {

struct AoiRegion {
  int id = 0;
  Vec2 lo;
  Vec2 hi;
  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

// Read-only per-scenario data shared by every trial on it: the inflated cost
// map, one distance field per goal, and the AOI regions (bounding box of the
// member POIs grown by aoi_margin).
struct World {
  Scenario scenario;
  CostMap costmap;
  std::vector<GoalHypothesis> hypotheses;  // aligned with scenario.goals
  std::vector<DistanceField> fields;       // aligned with scenario.goals
  std::vector<AoiRegion> regions;
  TierOrder tier_order = kDefaultTierOrder;

  const DistanceField& field_for(int goal_id) const {
    for (std::size_t i = 0; i < scenario.goals.size(); ++i)
      if (scenario.goals[i].id == goal_id) return fields[i];
    throw ConfigError("no goal with id " + std::to_string(goal_id));
  }
  const DistanceField& final_field() const { return field_for(scenario.final_goal().id); }

  const AoiRegion* region_at(Vec2 p) const {
    for (const auto& r : regions)
      if (r.contains(p)) return &r;
    return nullptr;
  }
};

inline std::shared_ptr<const World> make_world(Scenario sc, TierOrder order = kDefaultTierOrder) {
  auto w = std::make_shared<World>();
  w->costmap = CostMap(sc.grid, sc.plan_inflation());
  w->hypotheses = hypotheses_from(sc);
  for (const auto& g : sc.goals) w->fields.emplace_back(w->costmap, g.position);
  for (const auto& a : sc.aois) {
    AoiRegion r{a.id, {1e300, 1e300}, {-1e300, -1e300}};
    for (int id : a.pois) {
      const Vec2 p = sc.find_goal(id)->position;
      r.lo = {std::min(r.lo.x, p.x), std::min(r.lo.y, p.y)};
      r.hi = {std::max(r.hi.x, p.x), std::max(r.hi.y, p.y)};
    }
    const double m = sc.params.aoi_margin;
    r.lo = r.lo - Vec2{m, m};
    r.hi = r.hi + Vec2{m, m};
    w->regions.push_back(r);
  }
  w->tier_order = order;
  w->scenario = std::move(sc);
  return w;
}

}  // namespace hmi
