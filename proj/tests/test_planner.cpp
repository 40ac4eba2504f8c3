#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "hmi/nav/autonomy.hpp"
#include "hmi/nav/planner.hpp"
#include "hmi/nav/profile.hpp"
#include "hmi/sim/robot.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hmi;
using hmi::test::random_grid;

namespace {

using oracle::BlockedMap;

void expect_valid_path(const PlannedPath& p, const BlockedMap& m, const GridFrame& f, Cell s, Cell g) {
  ASSERT_FALSE(p.cells.empty());
  EXPECT_EQ(p.cells.front(), s);
  EXPECT_EQ(p.cells.back(), g);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    EXPECT_FALSE(m.at(p.cells[i].x, p.cells[i].y));
    if (i == 0) continue;
    const int dx = p.cells[i].x - p.cells[i - 1].x, dy = p.cells[i].y - p.cells[i - 1].y;
    EXPECT_LE(std::abs(dx), 1);
    EXPECT_LE(std::abs(dy), 1);
    EXPECT_TRUE(dx || dy);
    if (dx && dy) {
      EXPECT_FALSE(m.at(p.cells[i - 1].x + dx, p.cells[i - 1].y));
      EXPECT_FALSE(m.at(p.cells[i - 1].x, p.cells[i - 1].y + dy));
    }
    sum += distance(p.waypoints[i - 1], p.waypoints[i]);
  }
  EXPECT_NEAR(p.total_length, sum, 1e-9);
  for (std::size_t i = 0; i < p.cells.size(); ++i) EXPECT_EQ(p.waypoints[i], f.center(p.cells[i]));
}

std::optional<Cell> random_free(std::mt19937_64& rng, const BlockedMap& m) {
  std::uniform_int_distribution<int> ux(0, m.w - 1), uy(0, m.h - 1);
  for (int tries = 0; tries < 1000; ++tries) {
    const Cell c{ux(rng), uy(rng)};
    if (!m.at(c.x, c.y)) return c;
  }
  return std::nullopt;
}

Params default_params() { return Params{}; }

}  // namespace

TEST(PathCost, ExactOrdering) {
  EXPECT_TRUE((PathCost{3, 0} < PathCost{0, 3}));   // 3 < 4.24
  EXPECT_TRUE((PathCost{0, 2} < PathCost{3, 0}));   // 2.83 < 3
  EXPECT_FALSE((PathCost{2, 0} < PathCost{2, 0}));
  EXPECT_TRUE((PathCost{1, 1} < PathCost{3, 0}));   // 2.41 < 3
  EXPECT_TRUE((PathCost{7, 0} < PathCost{0, 5}));   // 7 < 7.07
  EXPECT_FALSE((PathCost{0, 5} < PathCost{7, 0}));
  EXPECT_TRUE((PathCost{0, 12} < PathCost{17, 0}));  // 16.97 < 17
}

TEST(Plan, StartEqualsGoal) {
  const auto g = OccupancyGrid::empty(10, 10, 1.0);
  const CostMap map(g, 0.3);
  const auto p = plan(map, {4.5, 4.5}, {4.2, 4.9});
  ASSERT_EQ(p.waypoints.size(), 1u);
  EXPECT_EQ(p.total_length, 0.0);
}

TEST(Plan, StraightCorridorIsAxisAligned) {
  const auto g = OccupancyGrid::empty(10, 10, 0.5);
  const CostMap map(g, 0.3);
  const auto p = plan(map, {1.25, 2.25}, {3.75, 2.25});
  EXPECT_DOUBLE_EQ(p.total_length, 5 * 0.5);
  for (const auto& c : p.cells) EXPECT_EQ(c.y, 4);
}

TEST(Plan, ErrorsForObstacleEndpointsAndNoPath) {
  const auto g = hmi::test::grid_from({"#######", "#..#..#", "#..#..#", "#######"});
  const CostMap map(g, 0.3);
  try {
    (void)plan(map, {1.5, 1.5}, {4.5, 1.5});
    FAIL();
  } catch (const PlanError& e) {
    EXPECT_EQ(e.kind(), PlanError::Kind::NoPath);
  }
  try {
    (void)plan(map, {3.5, 1.5}, {1.5, 1.5});
    FAIL();
  } catch (const PlanError& e) {
    EXPECT_EQ(e.kind(), PlanError::Kind::OnObstacle);
  }
}

// 50 random 30x30 grids at p_occupied = 0.2: every solvable instance must
// match the oracle's cost exactly (to rounding of the oracle's float sum).
TEST(PlanOracle, FiftyRandomGrids) {
  std::mt19937_64 rng(2024);
  int solvable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_grid(rng, 30, 30, 0.2, 1.0);
    const CostMap map(g, 0.3);
    const auto om = oracle::inflate(g, 0.3);
    const auto s = random_free(rng, om), t = random_free(rng, om);
    ASSERT_TRUE(s && t);
    const auto expect = oracle::shortest_path(om, *s, *t, 1.0);
    const Vec2 sp = g.center(*s), tp = g.center(*t);
    if (!expect) {
      EXPECT_THROW((void)plan(map, sp, tp), PlanError) << "trial " << trial;
      continue;
    }
    ++solvable;
    const auto p = plan(map, sp, tp);
    EXPECT_NEAR(p.total_length, *expect, 1e-9) << "trial " << trial;
    expect_valid_path(p, om, g, *s, *t);
  }
  EXPECT_GE(solvable, 25);
}

TEST(PlanOracle, InflationOnFinerGrids) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_grid(rng, 24, 24, 0.04, 0.25);
    const CostMap map(g, 0.45);
    const auto om = oracle::inflate(g, 0.45);
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) ASSERT_EQ(map.blocked({x, y}), om.at(x, y)) << x << "," << y;
    const auto s = random_free(rng, om), t = random_free(rng, om);
    if (!s || !t) continue;
    const auto expect = oracle::shortest_path(om, *s, *t, 0.25);
    if (!expect) continue;
    EXPECT_NEAR(plan(map, g.center(*s), g.center(*t)).total_length, *expect, 1e-9);
  }
}

TEST(DistanceField, AgreesWithPointToPointPlans) {
  std::mt19937_64 rng(9);
  const auto g = random_grid(rng, 30, 30, 0.15, 1.0);
  const CostMap map(g, 0.3);
  const auto om = oracle::inflate(g, 0.3);
  const auto goal = random_free(rng, om);
  ASSERT_TRUE(goal);
  const DistanceField field(map, g.center(*goal));
  for (int i = 0; i < 40; ++i) {
    const auto s = random_free(rng, om);
    const auto expect = oracle::shortest_path(om, *s, *goal, 1.0);
    EXPECT_EQ(field.reachable(*s), expect.has_value());
    if (!expect) continue;
    EXPECT_NEAR(field.cost(*s)->meters(1.0), *expect, 1e-9);
    const auto p = field.path_from(g.center(*s));
    EXPECT_NEAR(p.total_length, *expect, 1e-9);
    expect_valid_path(p, om, g, *s, *goal);
  }
}

TEST(ExpectedSpeed, BoundaryAndClosedForm) {
  const auto g = OccupancyGrid::empty(200, 20, 0.1);
  const CostMap map(g, 0.45);
  const auto path = plan(map, {1.05, 1.05}, {18.05, 1.05});
  const auto p = default_params();
  EXPECT_EQ(expected_speed(path, path.total_length, p), 0.0);
  EXPECT_DOUBLE_EQ(expected_speed(path, 1.0, p), p.v_max);
  EXPECT_NEAR(expected_speed(path, path.total_length - 0.25, p), std::sqrt(2.0 * 0.5 * 0.25), 1e-12);
  EXPECT_NEAR(std::sqrt(2.0 * 0.5 * 0.25), 0.5, 1e-15);
}

TEST(ExpectedSpeed, RightAngleTurnHalvesSpeed) {
  const auto g = OccupancyGrid::empty(100, 100, 0.1);
  const CostMap map(g, 0.3);
  // L-shaped path assembled from two straight legs
  std::vector<Cell> cells;
  for (int x = 10; x <= 50; ++x) cells.push_back({x, 10});
  for (int y = 11; y <= 60; ++y) cells.push_back({50, y});
  const auto path = detail::make_path(g, cells, PathCost{static_cast<std::int64_t>(cells.size() - 1), 0});
  const double corner = 4.0;  // arc position of cell (50, 10)
  auto p = default_params();
  EXPECT_NEAR(curvature_factor(path, corner - 0.5 * p.curvature_lookahead, p.curvature_lookahead), 0.5, 1e-12);
  EXPECT_NEAR(expected_speed(path, corner - 0.5 * p.curvature_lookahead, p), 0.5 * p.v_max, 1e-12);
  EXPECT_DOUBLE_EQ(curvature_factor(path, 1.0, p.curvature_lookahead), 1.0);
}

TEST(ExpectedSpeedProperty, BoundedAndMonotoneTowardGoalOnStraight) {
  const auto g = OccupancyGrid::empty(200, 20, 0.1);
  const CostMap map(g, 0.45);
  const auto path = plan(map, {1.05, 1.05}, {18.05, 1.05});
  auto p = default_params();
  double prev = std::numeric_limits<double>::infinity();
  for (double s = path.total_length - 3.0; s <= path.total_length + 1e-9; s += 0.01) {
    const double v = expected_speed(path, s, p);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, p.v_max);
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  std::mt19937_64 rng(4);
  const auto rg = random_grid(rng, 40, 40, 0.1, 0.25);
  const CostMap rmap(rg, 0.3);
  for (int i = 0; i < 20; ++i) {
    std::uniform_int_distribution<int> u(1, 38);
    const Cell a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (rmap.blocked(a) || rmap.blocked(b)) continue;
    try {
      const auto rp = plan(rmap, rg.center(a), rg.center(b));
      for (double s = 0.0; s <= rp.total_length; s += 0.05) {
        const double v = expected_speed(rp, s, p);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, p.v_max);
      }
    } catch (const PlanError&) {
    }
  }
}

TEST(Autonomy, AlignedOnStraightPath) {
  const auto g = OccupancyGrid::empty(200, 40, 0.1);
  const CostMap map(g, 0.45);
  const auto path = plan(map, {1.05, 2.05}, {18.05, 2.05});
  RobotState s;
  s.pose = {5.05, 2.05, 0.0};
  const auto p = default_params();
  const auto cmd = autonomy_step(s, path, g, p);
  EXPECT_NEAR(cmd.angular, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(cmd.linear, expected_speed(path, project(path, s.pose.position()).arc, p));
  EXPECT_EQ(cmd.source, Agent::AI);
}

TEST(Autonomy, OffsetLeftTurnsRight) {
  const auto g = OccupancyGrid::empty(200, 40, 0.1);
  const CostMap map(g, 0.45);
  const auto path = plan(map, {1.05, 2.05}, {18.05, 2.05});
  RobotState s;
  s.pose = {5.05, 2.35, 0.0};
  EXPECT_LT(autonomy_step(s, path, g, default_params()).angular, 0.0);
  s.pose = {5.05, 1.75, 0.0};
  EXPECT_GT(autonomy_step(s, path, g, default_params()).angular, 0.0);
}

// The safety stop never lets the tracker push further into an obstacle:
// below the clearance threshold the command either does not reduce clearance
// over the next step or is an in-place rotation.
TEST(Autonomy, SafetyStopNeverClosesOnObstacle) {
  const auto g = OccupancyGrid::empty(100, 100, 0.1);
  const auto p = default_params();
  std::vector<Cell> cells;
  for (int x = 10; x <= 98; ++x) cells.push_back({x, 98});
  const auto path = detail::make_path(g, cells, PathCost{static_cast<std::int64_t>(cells.size() - 1), 0});
  for (double theta = -3.0; theta <= 3.1; theta += 0.25) {
    RobotState s;
    s.radius = 0.3;
    s.pose = {5.0, 9.9 - 0.3 - 0.05, theta};  // 0.05 m below the top wall
    const double here = clearance(g, s.pose.position(), s.radius);
    ASSERT_NEAR(here, 0.05, 1e-9);
    const auto cmd = autonomy_step(s, path, g, p);
    const auto next = step(s, cmd, g, p.dt, p.dt, {p.v_max, p.omega_max});
    EXPECT_FALSE(next.collision) << "theta " << theta;
    EXPECT_GE(clearance(g, next.state.pose.position(), s.radius), here - 1e-12) << "theta " << theta;
  }
}

TEST(AutonomyProperty, ReachesGoalInEmptyRoom) {
  const auto g = OccupancyGrid::empty(100, 100, 0.1);
  auto p = default_params();
  const CostMap map(g, p.robot_radius + p.plan_margin);
  const Vec2 goal{8.05, 8.05};
  const DistanceField field(map, goal);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(1.0, 9.0), ut(-3.1, 3.1);
  for (int run = 0; run < 12; ++run) {
    RobotState s;
    s.radius = p.robot_radius;
    do s.pose = {u(rng), u(rng), ut(rng)};
    while (map.blocked(g.cell_of(s.pose.position())));
    bool arrived = false;
    for (int k = 0; k * p.dt < p.t_max && !arrived; ++k) {
      const auto path = field.path_from(s.pose.position());
      const auto cmd = autonomy_step(s, path, g, p);
      s = step(s, cmd, g, p.dt, (k + 1) * p.dt, {p.v_max, p.omega_max}).state;
      arrived = distance(s.pose.position(), goal) <= p.arrival_radius;
    }
    EXPECT_TRUE(arrived) << "run " << run;
  }
}
