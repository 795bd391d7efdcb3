#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace aggorient {

using Vec2 = Eigen::Vector2d;

/// Symmetric m x m matrix of pairwise Euclidean distances.
using DistanceMatrix = Eigen::MatrixXd;

/// A finite set of planar coordinates describing one simply connected shape.
struct PointSet {
  std::vector<Vec2> points;
  std::string source_id;

  PointSet() = default;
  explicit PointSet(std::vector<Vec2> pts, std::string id = {})
      : points(std::move(pts)), source_id(std::move(id)) {}

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const Vec2& operator[](std::size_t i) const { return points[i]; }
  Vec2& operator[](std::size_t i) { return points[i]; }
};

/// Pixel lattice {0..height} x {0..width}; the first coordinate indexes rows.
struct GridSpec {
  int height = 400;
  int width = 400;
};

/// x -> R(angle) * (x - translation): shift by the translation in the negative
/// direction, then rotate about the origin.
struct RigidTransform {
  Vec2 translation = Vec2::Zero();
  double angle = 0.0;  // radians, kept in [0, 2*pi)

  RigidTransform() = default;
  RigidTransform(Vec2 c, double theta);

  static RigidTransform identity() { return {}; }

  Vec2 operator()(const Vec2& x) const;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kHalfPi = 0.5 * kPi;

/// Maps any angle into [0, 2*pi).
double wrap_two_pi(double theta);
/// Maps any angle into (-pi, pi].
double wrap_pi(double theta);

Eigen::Matrix2d rotation(double theta);

PointSet apply_rigid(const RigidTransform& t, const PointSet& ps);
RigidTransform invert_rigid(const RigidTransform& t);
/// outer o inner, i.e. x -> outer(inner(x)).
RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);

DistanceMatrix distance_matrix(const PointSet& ps);

Vec2 centroid(const PointSet& ps);

/// Classical multidimensional scaling into the plane.
///
/// The first output axis carries the leading eigenvector of the doubly
/// centered squared-distance matrix, so the major axis lies along x. Signs are
/// fixed so that the x coordinates have nonnegative third moment and the point
/// with the largest x coordinate has nonnegative y. Throws NonPlanarError when
/// the third eigenvalue exceeds `rank_tol` times the leading one.
PointSet mds_embed(const DistanceMatrix& d, double rank_tol = 1e-6);

/// Farthest-point subsample to at most `n_max` points, seeded at the point
/// nearest the centroid. Ties resolve to the lowest index.
PointSet subsample(const PointSet& ps, std::size_t n_max);

/// Rounds both sets to the pixel lattice (half-up on each axis) and returns
/// the de-duplicated union in lexicographic order.
PointSet rasterize_union(const PointSet& a, const PointSet& b, const GridSpec& grid);

/// Removes exact duplicate coordinates, keeping first occurrences.
PointSet deduplicate(const PointSet& ps);

/// Throws DegenerateError unless ps has at least three non-collinear points.
void require_shape(const PointSet& ps);

}  // namespace aggorient
