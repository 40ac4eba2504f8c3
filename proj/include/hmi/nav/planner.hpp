#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numbers>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmi/sim/geometry.hpp"
#include "hmi/sim/grid.hpp"

namespace hmi {

class PlanError : public std::runtime_error {
 public:
  enum class Kind { NoPath, OnObstacle };
  PlanError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Length of an 8-connected grid path as (#straight moves, #diagonal moves).
// Values a + b*sqrt(2) are compared exactly, so equal-cost detection and the
// optimum itself never depend on floating-point summation order.
struct PathCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  double cells() const { return static_cast<double>(straight) + std::numbers::sqrt2 * diagonal; }
  double meters(double resolution) const { return cells() * resolution; }

  friend constexpr bool operator==(PathCost, PathCost) = default;
  friend bool operator<(PathCost x, PathCost y) {
    // x < y  <=>  da < db * sqrt(2)
    const std::int64_t da = x.straight - y.straight;
    const std::int64_t db = y.diagonal - x.diagonal;
    if (db >= 0) return da < 0 || da * da < 2 * db * db;
    return da < 0 && da * da > 2 * db * db;
  }
  friend PathCost operator+(PathCost x, PathCost y) {
    return {x.straight + y.straight, x.diagonal + y.diagonal};
  }
};

// The occupancy grid with every cell whose centre lies closer than
// `inflation` to an occupied cell marked blocked.
class CostMap {
 public:
  CostMap() = default;
  CostMap(const OccupancyGrid& grid, double inflation) : grid_(grid), inflation_(inflation) {
    blocked_.assign(grid.size(), 0);
    const int reach = static_cast<int>(std::ceil(inflation / grid.resolution())) + 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Cell c = grid.cell_at(i);
      if (!grid.occupied(c)) continue;
      blocked_[i] = 1;
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const Cell n{c.x + dx, c.y + dy};
          if (!grid.in_bounds(n)) continue;
          auto& b = blocked_[grid.index(n)];
          if (!b && grid.distance_to_cell(grid.center(n), c) < inflation) b = 1;
        }
      }
    }
  }

  const OccupancyGrid& grid() const noexcept { return grid_; }
  double inflation() const noexcept { return inflation_; }
  bool blocked(Cell c) const noexcept { return !grid_.in_bounds(c) || blocked_[grid_.index(c)] != 0; }

  // Nearest unblocked cell to p within `max_cells` (Chebyshev), preferring
  // the smallest Euclidean distance and then the lowest index.
  std::optional<Cell> nearest_free(Vec2 p, int max_cells = 3) const {
    const Cell c0 = grid_.cell_of(p);
    if (!blocked(c0)) return c0;
    std::optional<Cell> best;
    double best_d = 0.0;
    for (int dy = -max_cells; dy <= max_cells; ++dy) {
      for (int dx = -max_cells; dx <= max_cells; ++dx) {
        const Cell c{c0.x + dx, c0.y + dy};
        if (blocked(c)) continue;
        const double d = distance(grid_.center(c), p);
        if (!best || d < best_d || (d == best_d && grid_.index(c) < grid_.index(*best))) {
          best = c;
          best_d = d;
        }
      }
    }
    return best;
  }

 private:
  OccupancyGrid grid_;
  double inflation_ = 0.0;
  std::vector<std::uint8_t> blocked_;
};

struct PlannedPath {
  std::vector<Cell> cells;
  std::vector<Vec2> waypoints;  // cell centres
  std::vector<double> arc;      // cumulative length at each waypoint
  PathCost cost;
  double total_length = 0.0;

  bool empty() const { return waypoints.empty(); }
};

namespace detail {

struct Move {
  int dx, dy;
  bool diagonal;
};

inline constexpr Move kMoves[8] = {{1, 0, false},  {-1, 0, false}, {0, 1, false},  {0, -1, false},
                                   {1, 1, true},   {1, -1, true},  {-1, 1, true},  {-1, -1, true}};

// Diagonal moves may not cut the corner of a blocked orthogonal neighbour.
inline bool move_allowed(const CostMap& map, Cell from, Move m) {
  const Cell to{from.x + m.dx, from.y + m.dy};
  if (map.blocked(to)) return false;
  if (m.diagonal && (map.blocked({from.x + m.dx, from.y}) || map.blocked({from.x, from.y + m.dy})))
    return false;
  return true;
}

struct QueueEntry {
  PathCost cost;
  std::size_t index;
  // priority_queue pops the largest; invert so the cheapest, then the lowest
  // cell index, comes first.
  friend bool operator<(const QueueEntry& a, const QueueEntry& b) {
    if (a.cost == b.cost) return a.index > b.index;
    return b.cost < a.cost;
  }
};

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct SearchResult {
  std::vector<PathCost> cost;
  std::vector<std::size_t> parent;
  std::vector<std::uint8_t> done;
};

// Dijkstra from `source`; stops early when `target` is settled.
inline SearchResult dijkstra(const CostMap& map, Cell source, std::optional<Cell> target) {
  const auto& grid = map.grid();
  SearchResult r;
  r.cost.assign(grid.size(), PathCost{});
  r.parent.assign(grid.size(), kNone);
  r.done.assign(grid.size(), 0);
  std::vector<std::uint8_t> seen(grid.size(), 0);

  std::priority_queue<QueueEntry> open;
  const auto s = grid.index(source);
  seen[s] = 1;
  open.push({PathCost{}, s});
  while (!open.empty()) {
    const auto top = open.top();
    open.pop();
    if (r.done[top.index]) continue;
    r.done[top.index] = 1;
    const Cell c = grid.cell_at(top.index);
    if (target && c == *target) break;
    for (const auto& m : kMoves) {
      if (!move_allowed(map, c, m)) continue;
      const Cell n{c.x + m.dx, c.y + m.dy};
      const auto ni = grid.index(n);
      if (r.done[ni]) continue;
      const PathCost nc = top.cost + (m.diagonal ? PathCost{0, 1} : PathCost{1, 0});
      if (!seen[ni] || nc < r.cost[ni] || (nc == r.cost[ni] && top.index < r.parent[ni])) {
        seen[ni] = 1;
        r.cost[ni] = nc;
        r.parent[ni] = top.index;
        open.push({nc, ni});
      }
    }
  }
  return r;
}

inline PlannedPath make_path(const GridFrame& grid, std::vector<Cell> cells, PathCost cost) {
  PlannedPath p;
  p.cells = std::move(cells);
  p.cost = cost;
  p.waypoints.reserve(p.cells.size());
  p.arc.reserve(p.cells.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    p.waypoints.push_back(grid.center(p.cells[i]));
    if (i > 0) acc += distance(p.waypoints[i - 1], p.waypoints[i]);
    p.arc.push_back(acc);
  }
  p.total_length = cost.meters(grid.resolution());
  if (!p.arc.empty()) p.arc.back() = p.total_length;
  return p;
}

}  // namespace detail

// Shortest 8-connected path between the cells containing `start` and `goal`
// on the inflated map. Straight moves cost one resolution, diagonal moves
// sqrt(2) resolutions; among equal-cost paths the one reached through lower
// cell indices wins.
inline PlannedPath plan(const CostMap& map, Vec2 start, Vec2 goal) {
  const auto& grid = map.grid();
  const Cell s = grid.cell_of(start), g = grid.cell_of(goal);
  if (map.blocked(s)) throw PlanError(PlanError::Kind::OnObstacle, "start lies in inflated obstacle space");
  if (map.blocked(g)) throw PlanError(PlanError::Kind::OnObstacle, "goal lies in inflated obstacle space");
  const auto r = detail::dijkstra(map, s, g);
  const auto gi = grid.index(g);
  if (!r.done[gi]) throw PlanError(PlanError::Kind::NoPath, "goal unreachable");
  std::vector<Cell> cells;
  for (auto i = gi; i != detail::kNone; i = r.parent[i]) cells.push_back(grid.cell_at(i));
  std::reverse(cells.begin(), cells.end());
  return detail::make_path(grid, std::move(cells), r.cost[gi]);
}

// Single-source shortest-path tree rooted at a goal. Since moves are
// symmetric, the cost of any cell equals the planned path length from that
// cell to the goal, and following parents walks an optimal path to it.
class DistanceField {
 public:
  DistanceField() = default;
  DistanceField(const CostMap& map, Vec2 goal) : grid_(map.grid().frame()) {
    root_ = map.grid().cell_of(goal);
    if (map.blocked(root_)) throw PlanError(PlanError::Kind::OnObstacle, "goal lies in inflated obstacle space");
    auto r = detail::dijkstra(map, root_, std::nullopt);
    cost_ = std::move(r.cost);
    parent_ = std::move(r.parent);
    reached_ = std::move(r.done);
  }

  Cell root() const noexcept { return root_; }
  bool reachable(Cell c) const { return grid_.in_bounds(c) && reached_[grid_.index(c)] != 0; }

  std::optional<PathCost> cost(Cell c) const {
    if (!reachable(c)) return std::nullopt;
    return cost_[grid_.index(c)];
  }

  // Path length (m) from an arbitrary position: the field value of the best
  // reachable cell within two cells of p plus the straight hop to its
  // centre. +inf when nothing nearby is reachable.
  double distance_from(Vec2 p) const {
    const auto c = anchor(p);
    if (!c) return std::numeric_limits<double>::infinity();
    return cost_[grid_.index(*c)].meters(grid_.resolution()) + distance(p, grid_.center(*c));
  }

  std::optional<Cell> anchor(Vec2 p) const {
    const Cell c0 = grid_.cell_of(p);
    if (reachable(c0)) return c0;
    std::optional<Cell> best;
    double best_v = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        const Cell c{c0.x + dx, c0.y + dy};
        if (!reachable(c)) continue;
        const double v = cost_[grid_.index(c)].meters(grid_.resolution()) + distance(p, grid_.center(c));
        if (!best || v < best_v) {
          best = c;
          best_v = v;
        }
      }
    }
    return best;
  }

  // Point reached by walking `length` metres along the optimal path from p
  // towards the root (the root itself when the path is shorter).
  Vec2 lookahead(Vec2 p, double length) const {
    auto c = anchor(p);
    if (!c) return p;
    Vec2 prev = p;
    double walked = 0.0;
    std::size_t i = grid_.index(*c);
    while (true) {
      const Vec2 here = grid_.center(grid_.cell_at(i));
      walked += distance(prev, here);
      if (walked >= length || parent_[i] == detail::kNone) return here;
      prev = here;
      i = parent_[i];
    }
  }

  // The optimal path from p's anchor cell to the root.
  PlannedPath path_from(Vec2 p) const {
    const auto c = anchor(p);
    if (!c) throw PlanError(PlanError::Kind::NoPath, "no reachable cell near position");
    std::vector<Cell> cells;
    for (auto i = grid_.index(*c); i != detail::kNone; i = parent_[i]) cells.push_back(grid_.cell_at(i));
    return detail::make_path(grid_, std::move(cells), cost_[grid_.index(*c)]);
  }

 private:
  GridFrame grid_;
  Cell root_;
  std::vector<PathCost> cost_;
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> reached_;
};

}  // namespace hmi
