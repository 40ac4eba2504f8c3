#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hmi/core/error.hpp"
#include "hmi/core/params.hpp"
#include "hmi/nav/planner.hpp"
#include "hmi/sim/grid.hpp"
#include "hmi/sim/robot.hpp"

namespace hmi {

enum class GoalKind { POI, AoiWaypoint, Final };

inline std::string_view to_string(GoalKind k) {
  switch (k) {
    case GoalKind::POI: return "poi";
    case GoalKind::AoiWaypoint: return "aoi_waypoint";
    case GoalKind::Final: return "final";
  }
  return "?";
}

// POIs use their map digit as id; the final goal always has id 0.
inline constexpr int kFinalGoalId = 0;

struct Goal {
  int id = 0;
  Vec2 position;
  GoalKind kind = GoalKind::POI;
  std::optional<int> aoi;
};

struct Aoi {
  int id = 0;
  std::vector<int> pois;  // in id order
};

struct Scenario {
  OccupancyGrid grid;
  Pose start;
  std::vector<Goal> goals;  // sorted by id
  std::vector<Aoi> aois;    // sorted by id
  Params params;

  const Goal& final_goal() const {
    for (const auto& g : goals)
      if (g.kind == GoalKind::Final) return g;
    throw ConfigError("scenario has no final goal");
  }
  const Goal* find_goal(int id) const {
    for (const auto& g : goals)
      if (g.id == id) return &g;
    return nullptr;
  }
  std::size_t poi_count() const {
    return static_cast<std::size_t>(
        std::count_if(goals.begin(), goals.end(), [](const Goal& g) { return g.kind == GoalKind::POI; }));
  }
  SpeedLimits limits() const { return {params.v_max, params.omega_max}; }
  double plan_inflation() const { return params.robot_radius + params.plan_margin; }
};

namespace detail {

inline bool is_map_char(char c) {
  return c == '#' || c == '.' || c == 'S' || c == 'F' || (c >= '1' && c <= '9');
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();
  return lines;
}

}  // namespace detail

// Parses the ASCII scenario format:
//
//   resolution=0.1
//   aoi 1 = 123
//   param v_max=0.8
//   ##########
//   #S..1...F#
//   ##########
//
// Directive lines start with a lowercase keyword; every other non-empty line
// is a map row (`#` occupied, `.` free, `S` start, `F` final, `1`-`9` POIs).
// The first map row is the top of the world (largest y).
//
// `overrides` are name=value assignments applied after the scenario's own
// `param` lines (parameter files and command-line settings).
inline Scenario parse_scenario(std::string_view text, const Params& base = {},
                               const std::vector<std::string>& overrides = {}) {
  using K = ScenarioError::Kind;
  Scenario sc;
  sc.params = base;
  double resolution = 0.1;
  struct AoiLine {
    int line;
    int id;
    std::string digits;
  };
  std::vector<AoiLine> aoi_lines;
  std::vector<std::pair<int, std::string>> rows;  // (line number, text)

  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    const std::string& raw = lines[i];
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line[0] >= 'a' && line[0] <= 'z') {
      if (!rows.empty()) throw ScenarioError(K::Syntax, ln, 1, "directive after map rows");
      if (line.rfind("resolution", 0) == 0) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || detail::trim(line.substr(0, eq)) != "resolution")
          throw ScenarioError(K::Syntax, ln, 1, "expected resolution=<meters>");
        try {
          resolution = parse_number(line.substr(eq + 1), "resolution");
        } catch (const ConfigError& e) {
          throw ScenarioError(K::Syntax, ln, static_cast<int>(eq) + 2, e.what());
        }
        if (!(resolution > 0.0)) throw ScenarioError(K::Syntax, ln, static_cast<int>(eq) + 2, "resolution must be > 0");
      } else if (line.rfind("aoi ", 0) == 0) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ScenarioError(K::Syntax, ln, 1, "expected aoi <id> = <goal digits>");
        const std::string id_text = detail::trim(line.substr(4, eq - 4));
        const std::string digits = detail::trim(line.substr(eq + 1));
        int id = 0;
        try {
          std::size_t used = 0;
          id = std::stoi(id_text, &used);
          if (used != id_text.size() || id < 1) throw std::invalid_argument("aoi id");
        } catch (const std::exception&) {
          throw ScenarioError(K::Syntax, ln, 5, "invalid aoi id '" + id_text + "'");
        }
        if (digits.empty()) throw ScenarioError(K::Syntax, ln, static_cast<int>(eq) + 2, "aoi lists no goals");
        for (std::size_t k = 0; k < digits.size(); ++k)
          if (digits[k] < '1' || digits[k] > '9')
            throw ScenarioError(K::Syntax, ln, static_cast<int>(raw.find(digits)) + static_cast<int>(k) + 1,
                                "aoi members must be POI digits 1-9");
        aoi_lines.push_back({ln, id, digits});
      } else if (line.rfind("param ", 0) == 0) {
        try {
          apply_assignment(sc.params, line.substr(6));
        } catch (const ConfigError& e) {
          throw ScenarioError(K::Syntax, ln, 7, e.what());
        }
      } else {
        throw ScenarioError(K::Syntax, ln, 1, "unknown directive '" + line.substr(0, line.find_first_of(" =")) + "'");
      }
      continue;
    }
    rows.emplace_back(ln, raw);
  }

  for (const auto& o : overrides) apply_assignment(sc.params, o);

  if (rows.empty()) throw ScenarioError(K::Syntax, 0, 0, "no map rows");
  const int width = static_cast<int>(rows.front().second.size());
  const int height = static_cast<int>(rows.size());
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height, 0);
  std::optional<Cell> start;
  struct RawGoal {
    int id;
    GoalKind kind;
    Cell cell;
    int line, col;
  };
  std::vector<RawGoal> raw_goals;

  for (int r = 0; r < height; ++r) {
    const auto& [ln, row] = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != width)
      throw ScenarioError(K::Syntax, ln, std::min<int>(static_cast<int>(row.size()), width) + 1,
                          "map row length " + std::to_string(row.size()) + " differs from " + std::to_string(width));
    const int y = height - 1 - r;
    for (int x = 0; x < width; ++x) {
      const char c = row[static_cast<std::size_t>(x)];
      if (!detail::is_map_char(c))
        throw ScenarioError(K::Syntax, ln, x + 1, std::string("unexpected character '") + c + "'");
      const Cell cell{x, y};
      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
      if (c == '#') cells[idx] = 1;
      if (c == 'S') {
        if (start) throw ScenarioError(K::Syntax, ln, x + 1, "more than one start");
        start = cell;
      } else if (c == 'F') {
        raw_goals.push_back({kFinalGoalId, GoalKind::Final, cell, ln, x + 1});
      } else if (c >= '1' && c <= '9') {
        raw_goals.push_back({c - '0', GoalKind::POI, cell, ln, x + 1});
      }
    }
  }
  if (!start) throw ScenarioError(K::Syntax, 0, 0, "map has no start 'S'");

  sc.grid = OccupancyGrid(width, height, resolution, std::move(cells));
  const auto& g = sc.grid;

  std::set<int> ids;
  for (const auto& rg : raw_goals) {
    if (!ids.insert(rg.id).second)
      throw ScenarioError(K::DuplicateGoal, rg.line, rg.col,
                          "duplicate goal id " + (rg.kind == GoalKind::Final ? std::string("F") : std::to_string(rg.id)));
    if (g.occupied(rg.cell)) throw ScenarioError(K::Invalid, rg.line, rg.col, "goal on the closed outer border");
    sc.goals.push_back({rg.id, g.center(rg.cell), rg.kind, std::nullopt});
  }
  if (std::none_of(sc.goals.begin(), sc.goals.end(), [](const Goal& x) { return x.kind == GoalKind::Final; }))
    throw ScenarioError(K::Invalid, 0, 0, "map has no final goal 'F'");
  std::sort(sc.goals.begin(), sc.goals.end(), [](const Goal& a, const Goal& b) { return a.id < b.id; });

  for (const auto& al : aoi_lines) {
    if (std::any_of(sc.aois.begin(), sc.aois.end(), [&](const Aoi& a) { return a.id == al.id; }))
      throw ScenarioError(K::Syntax, al.line, 1, "aoi " + std::to_string(al.id) + " declared twice");
    Aoi aoi{al.id, {}};
    for (char d : al.digits) {
      const int gid = d - '0';
      auto it = std::find_if(sc.goals.begin(), sc.goals.end(), [&](const Goal& x) { return x.id == gid; });
      if (it == sc.goals.end())
        throw ScenarioError(K::Invalid, al.line, 1, std::string("aoi references missing goal ") + d);
      if (it->aoi)
        throw ScenarioError(K::Invalid, al.line, 1, std::string("goal ") + d + " assigned to two aois");
      it->aoi = al.id;
      aoi.pois.push_back(gid);
    }
    std::sort(aoi.pois.begin(), aoi.pois.end());
    sc.aois.push_back(std::move(aoi));
  }
  std::sort(sc.aois.begin(), sc.aois.end(), [](const Aoi& a, const Aoi& b) { return a.id < b.id; });

  check_consistency(sc.params);
  const Vec2 sp = g.center(*start);
  sc.start = Pose{sp.x, sp.y, 0.0};
  const int sline = rows[static_cast<std::size_t>(height - 1 - start->y)].first;
  if (g.occupied(*start)) throw ScenarioError(K::StartOnObstacle, sline, start->x + 1, "start on obstacle");
  if (disc_collides(g, sp, sc.params.robot_radius))
    throw ScenarioError(K::StartOnObstacle, sline, start->x + 1, "robot disc at start overlaps an obstacle");

  const CostMap map(g, sc.plan_inflation());
  if (map.blocked(*start))
    throw ScenarioError(K::StartOnObstacle, sline, start->x + 1, "start lies in inflated obstacle space");
  for (const auto& goal : sc.goals) {
    try {
      (void)plan(map, sp, goal.position);
    } catch (const PlanError& e) {
      const auto gc = g.cell_of(goal.position);
      const std::string name = goal.kind == GoalKind::Final ? "final goal" : "goal " + std::to_string(goal.id);
      throw ScenarioError(K::UnreachableGoal, rows[static_cast<std::size_t>(height - 1 - gc.y)].first, gc.x + 1,
                          name + " unreachable: " + e.what());
    }
  }
  return sc;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::string& path, const Params& base = {},
                              const std::vector<std::string>& overrides = {}) {
  return parse_scenario(read_text_file(path), base, overrides);
}

}  // namespace hmi
