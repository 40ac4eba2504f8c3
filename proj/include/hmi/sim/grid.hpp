#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hmi/core/error.hpp"
#include "hmi/sim/geometry.hpp"

namespace hmi {

struct Cell {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Cell, Cell) = default;
};

// Geometry of a row-major cell lattice. Cell (x, y) covers
// [x*res, (x+1)*res) x [y*res, (y+1)*res); y grows upwards.
class GridFrame {
 public:
  GridFrame() = default;
  GridFrame(int width, int height, double resolution)
      : width_(width), height_(height), resolution_(resolution) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  bool in_bounds(Cell c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const noexcept {
    return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }
  Cell cell_of(Vec2 p) const noexcept {
    return {static_cast<int>(std::floor(p.x / resolution_)),
            static_cast<int>(std::floor(p.y / resolution_))};
  }
  Vec2 center(Cell c) const noexcept {
    return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_};
  }
  bool contains(Vec2 p) const noexcept { return in_bounds(cell_of(p)); }

  // Euclidean distance from p to the closed square of cell c (0 inside).
  double distance_to_cell(Vec2 p, Cell c) const noexcept {
    const double x0 = c.x * resolution_, x1 = x0 + resolution_;
    const double y0 = c.y * resolution_, y1 = y0 + resolution_;
    const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
    const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
    return std::hypot(dx, dy);
  }

 protected:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
};

// Boolean occupancy map. The outer border is forced occupied so the world
// is closed, and lookups outside the grid report occupied.
class OccupancyGrid : public GridFrame {
 public:
  OccupancyGrid() = default;

  OccupancyGrid(int width, int height, double resolution, std::vector<std::uint8_t> cells)
      : GridFrame(width, height, resolution), cells_(std::move(cells)) {
    if (width < 1 || height < 1) throw ConfigError("grid dimensions must be positive");
    if (!(resolution > 0.0)) throw ConfigError("grid resolution must be > 0");
    if (cells_.size() != size())
      throw ConfigError("grid cell count does not match width*height");
    for (int x = 0; x < width_; ++x) {
      cells_[index({x, 0})] = 1;
      cells_[index({x, height_ - 1})] = 1;
    }
    for (int y = 0; y < height_; ++y) {
      cells_[index({0, y})] = 1;
      cells_[index({width_ - 1, y})] = 1;
    }
  }

  static OccupancyGrid empty(int width, int height, double resolution) {
    return OccupancyGrid(width, height, resolution,
                         std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0));
  }

  const GridFrame& frame() const noexcept { return *this; }

  bool occupied(Cell c) const noexcept { return !in_bounds(c) || cells_[index(c)] != 0; }

  void set_occupied(Cell c, bool occ) {
    if (!in_bounds(c)) return;
    if (c.x == 0 || c.y == 0 || c.x == width_ - 1 || c.y == height_ - 1) return;
    cells_[index(c)] = occ ? 1 : 0;
  }

  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

 private:
  std::vector<std::uint8_t> cells_;
};

// True when a disc of the given radius strictly overlaps an occupied cell.
// Touching a cell boundary exactly is not an overlap.
inline bool disc_collides(const OccupancyGrid& grid, Vec2 center, double radius) {
  const double res = grid.resolution();
  const int x0 = static_cast<int>(std::floor((center.x - radius) / res));
  const int x1 = static_cast<int>(std::floor((center.x + radius) / res));
  const int y0 = static_cast<int>(std::floor((center.y - radius) / res));
  const int y1 = static_cast<int>(std::floor((center.y + radius) / res));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (grid.occupied({x, y}) && grid.distance_to_cell(center, {x, y}) < radius) return true;
  return false;
}

// Distance from p to the nearest occupied cell boundary minus `radius`.
// Negative when the disc overlaps an obstacle. Searches square rings of cells
// outwards from p and stops once no farther ring can beat the best distance.
// With a finite `search_limit` (m, measured from p) the result saturates at
// search_limit - radius.
inline double clearance(const OccupancyGrid& grid, Vec2 p, double radius,
                        double search_limit = std::numeric_limits<double>::infinity()) {
  const Cell c0 = grid.cell_of(p);
  const double res = grid.resolution();
  double best = search_limit;
  const int max_ring = std::max(grid.width(), grid.height()) + 1;
  for (int k = 0; k <= max_ring; ++k) {
    // Every cell on ring k is at least (k - 1) cells away from p.
    if (static_cast<double>(k - 1) * res >= best) break;
    for (int dy = -k; dy <= k; ++dy) {
      const bool edge_row = (dy == -k || dy == k);
      const int step = edge_row ? 1 : 2 * k;
      for (int dx = -k; dx <= k; dx += (step == 0 ? 1 : step)) {
        const Cell c{c0.x + dx, c0.y + dy};
        if (!grid.in_bounds(c) || !grid.occupied(c)) continue;
        best = std::min(best, grid.distance_to_cell(p, c));
      }
    }
  }
  return best - radius;
}

}  // namespace hmi
