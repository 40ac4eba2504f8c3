#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hmi/harness/config.hpp"
#include "hmi/sim/grid.hpp"

namespace hmi::test {

// Grid from rows of '#' and '.', first row on top.
inline OccupancyGrid grid_from(const std::vector<std::string>& rows, double resolution = 1.0) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h, 0);
  for (int r = 0; r < h; ++r)
    for (int x = 0; x < w; ++x)
      if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] == '#')
        cells[static_cast<std::size_t>(h - 1 - r) * w + x] = 1;
  return OccupancyGrid(w, h, resolution, std::move(cells));
}

inline OccupancyGrid random_grid(std::mt19937_64& rng, int w, int h, double p_occupied, double resolution = 1.0) {
  std::bernoulli_distribution occ(p_occupied);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h);
  for (auto& c : cells) c = occ(rng) ? 1 : 0;
  return OccupancyGrid(w, h, resolution, std::move(cells));
}

inline std::string arena_path() { return bundled_data_path("arena.map"); }

inline std::shared_ptr<const World> arena_world(const std::vector<std::string>& overrides = {}) {
  return load_world(arena_path(), {}, overrides, load_tier_order(bundled_data_path("criticality.ahp")));
}

}  // namespace hmi::test
