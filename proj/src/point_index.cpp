#include "aggorient/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aggorient {

PointIndex::PointIndex(const PointSet& ps) : points_(ps.points) {
  if (points_.empty()) throw std::invalid_argument("PointIndex: empty point set");
  origin_ = upper_ = points_.front();
  for (const auto& p : points_) {
    origin_ = origin_.cwiseMin(p);
    upper_ = upper_.cwiseMax(p);
  }
  const Vec2 span = upper_ - origin_;
  const double area = std::max(span.x(), 1.0) * std::max(span.y(), 1.0);
  // about two points per cell
  cell_ = std::max(std::sqrt(2.0 * area / static_cast<double>(points_.size())), 1e-9);
  rows_ = static_cast<long>(span.x() / cell_) + 1;
  cols_ = static_cast<long>(span.y() / cell_) + 1;

  const auto cells = static_cast<std::size_t>(rows_ * cols_);
  std::vector<std::size_t> cell_of(points_.size());
  start_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const long r = std::min(rows_ - 1, static_cast<long>((points_[i].x() - origin_.x()) / cell_));
    const long c = std::min(cols_ - 1, static_cast<long>((points_[i].y() - origin_.y()) / cell_));
    cell_of[i] = static_cast<std::size_t>(r * cols_ + c);
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t k = 0; k < cells; ++k) start_[k + 1] += start_[k];
  items_.resize(points_.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) items_[fill[cell_of[i]]++] = i;

  constexpr double kMaxSites = 1 << 24;
  const bool integral = std::all_of(points_.begin(), points_.end(), [](const Vec2& p) {
    return p.x() == std::floor(p.x()) && p.y() == std::floor(p.y());
  });
  if (integral && (span.x() + 1.0) * (span.y() + 1.0) <= kMaxSites) {
    pixel_rows_ = static_cast<long>(span.x()) + 1;
    pixel_cols_ = static_cast<long>(span.y()) + 1;
    pixel_.assign(static_cast<std::size_t>(pixel_rows_ * pixel_cols_), -1);
    for (std::size_t i = points_.size(); i-- > 0;) {
      const auto r = static_cast<long>(points_[i].x() - origin_.x());
      const auto c = static_cast<long>(points_[i].y() - origin_.y());
      pixel_[static_cast<std::size_t>(r * pixel_cols_ + c)] = static_cast<std::int64_t>(i);
    }
  }
}

std::size_t PointIndex::nearest(const Vec2& q) const {
  if (!pixel_.empty()) {
    // The lattice site nearest to q is unique unless a coordinate sits exactly
    // halfway between sites; an occupied unique site is the answer.
    const double fr = q.x() - origin_.x(), fc = q.y() - origin_.y();
    const double rr = std::floor(fr + 0.5), rc = std::floor(fc + 0.5);
    if (rr - fr != 0.5 && rc - fc != 0.5 && rr >= 0 && rc >= 0 && rr < pixel_rows_ && rc < pixel_cols_) {
      const std::int64_t hit = pixel_[static_cast<std::size_t>(static_cast<long>(rr) * pixel_cols_ + static_cast<long>(rc))];
      if (hit >= 0) return static_cast<std::size_t>(hit);
    }
  }
  return scan_nearest(q);
}

std::size_t PointIndex::scan_nearest(const Vec2& q) const {
  // Points inside the bounding box satisfy |q - p|^2 >= |q - q'|^2 + |q' - p|^2
  // for the projection q' of q onto the box, which bounds each ring from below.
  const Vec2 qc = q.cwiseMax(origin_).cwiseMin(upper_);
  const double outside = (q - qc).squaredNorm();
  const long r0 = std::min(rows_ - 1, static_cast<long>((qc.x() - origin_.x()) / cell_));
  const long c0 = std::min(cols_ - 1, static_cast<long>((qc.y() - origin_.y()) / cell_));
  const long max_ring = std::max({r0, rows_ - 1 - r0, c0, cols_ - 1 - c0});

  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d = std::numeric_limits<double>::infinity();
  auto scan = [&](long r, long c) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return;
    const auto cell = static_cast<std::size_t>(r * cols_ + c);
    for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
      const std::size_t i = items_[k];
      const double d = (points_[i] - q).squaredNorm();
      if (d < best_d || (d == best_d && i < best)) {
        best_d = d;
        best = i;
      }
    }
  };
  for (long ring = 0; ring <= max_ring; ++ring) {
    if (ring == 0) {
      scan(r0, c0);
    } else {
      for (long c = c0 - ring; c <= c0 + ring; ++c) {
        scan(r0 - ring, c);
        scan(r0 + ring, c);
      }
      for (long r = r0 - ring + 1; r <= r0 + ring - 1; ++r) {
        scan(r, c0 - ring);
        scan(r, c0 + ring);
      }
    }
    const double reach = static_cast<double>(ring) * cell_;
    if (best_d < outside + reach * reach) break;
  }
  return best;
}

}  // namespace aggorient
