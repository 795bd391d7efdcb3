#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aggorient/geometry.hpp"

namespace aggorient {

/// Uniform-grid bucket index for exact nearest-neighbour queries in the plane.
/// Ties resolve to the lowest point index. Sets whose coordinates are all
/// integers also get a per-pixel table, so a query whose rounded position is
/// occupied is answered without scanning.
class PointIndex {
 public:
  explicit PointIndex(const PointSet& ps);

  std::size_t nearest(const Vec2& q) const;
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<Vec2> points_;
  Vec2 origin_ = Vec2::Zero();
  Vec2 upper_ = Vec2::Zero();
  double cell_ = 1.0;
  long rows_ = 1;
  long cols_ = 1;
  std::vector<std::size_t> start_;  // CSR offsets per cell
  std::vector<std::size_t> items_;  // point indices, ascending within a cell
  std::vector<std::int64_t> pixel_;  // lowest point index per lattice site, -1 if empty
  long pixel_rows_ = 0;
  long pixel_cols_ = 0;

  std::size_t scan_nearest(const Vec2& q) const;
};

}  // namespace aggorient
