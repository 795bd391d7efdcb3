#include "aggorient/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

#include "aggorient/error.hpp"

namespace aggorient {

double wrap_two_pi(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2*pi can round up to 2*pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double theta) {
  double r = wrap_two_pi(theta);
  return r > kPi ? r - kTwoPi : r;
}

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

RigidTransform::RigidTransform(Vec2 c, double theta)
    : translation(std::move(c)), angle(wrap_two_pi(theta)) {}

Vec2 RigidTransform::operator()(const Vec2& x) const {
  return rotation(angle) * (x - translation);
}

PointSet apply_rigid(const RigidTransform& t, const PointSet& ps) {
  const Eigen::Matrix2d r = rotation(t.angle);
  PointSet out;
  out.source_id = ps.source_id;
  out.points.reserve(ps.size());
  for (const auto& p : ps.points) out.points.emplace_back(r * (p - t.translation));
  return out;
}

RigidTransform invert_rigid(const RigidTransform& t) {
  // R(-a) y + c == R(-a) (y - (-R(a) c))
  return RigidTransform(-(rotation(t.angle) * t.translation), -t.angle);
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
  const Vec2 c = inner.translation + rotation(-inner.angle) * outer.translation;
  return RigidTransform(c, outer.angle + inner.angle);
}

DistanceMatrix distance_matrix(const PointSet& ps) {
  const auto m = static_cast<Eigen::Index>(ps.size());
  DistanceMatrix d = DistanceMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = (ps[i] - ps[j]).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Vec2 centroid(const PointSet& ps) {
  Vec2 s = Vec2::Zero();
  for (const auto& p : ps.points) s += p;
  return ps.empty() ? s : Vec2(s / static_cast<double>(ps.size()));
}

PointSet mds_embed(const DistanceMatrix& d, double rank_tol) {
  const Eigen::Index m = d.rows();
  PointSet out;
  out.points.assign(static_cast<std::size_t>(m), Vec2::Zero());
  if (m < 2) return out;

  // B = -1/2 J D^2 J
  Eigen::MatrixXd sq = d.array().square().matrix();
  const Eigen::VectorXd row_mean = sq.rowwise().mean();
  const Eigen::RowVectorXd col_mean = sq.colwise().mean();
  const double grand = sq.mean();
  Eigen::MatrixXd b = sq;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + grand);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  const Eigen::VectorXd& vals = eig.eigenvalues();  // ascending
  const double lead = vals(m - 1);
  if (lead <= 0.0) return out;

  double rest = 0.0;
  for (Eigen::Index k = 0; k + 2 < m; ++k) rest = std::max(rest, std::abs(vals(k)));
  if (rest > rank_tol * lead) {
    throw NonPlanarError("mds_embed: doubly centered matrix has rank above two");
  }

  const double l1 = lead;
  const double l2 = std::max(0.0, vals(m - 2));
  Eigen::VectorXd ax = eig.eigenvectors().col(m - 1) * std::sqrt(l1);
  Eigen::VectorXd ay = eig.eigenvectors().col(m - 2) * std::sqrt(l2);

  if (ax.array().cube().sum() < 0.0) ax = -ax;
  Eigen::Index far = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    if (ax(i) > ax(far)) far = i;
  if (ay(far) < 0.0) ay = -ay;

  for (Eigen::Index i = 0; i < m; ++i) out.points[static_cast<std::size_t>(i)] = Vec2(ax(i), ay(i));
  return out;
}

PointSet subsample(const PointSet& ps, std::size_t n_max) {
  if (n_max < 3) throw std::invalid_argument("subsample: n_max must be at least 3");
  if (ps.size() <= n_max) return ps;

  const Vec2 c = centroid(ps);
  std::size_t seed = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double dd = (ps[i] - c).squaredNorm();
    if (dd < best) {
      best = dd;
      seed = i;
    }
  }

  std::vector<double> gap(ps.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> chosen;
  chosen.reserve(n_max);
  std::size_t next = seed;
  while (chosen.size() < n_max) {
    chosen.push_back(next);
    const Vec2 q = ps[next];
    std::size_t arg = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double dd = (ps[i] - q).squaredNorm();
      if (dd < gap[i]) gap[i] = dd;
      if (gap[i] > far) {
        far = gap[i];
        arg = i;
      }
    }
    next = arg;
  }

  PointSet out;
  out.source_id = ps.source_id;
  out.points.reserve(n_max);
  for (auto i : chosen) out.points.push_back(ps[i]);
  return out;
}

PointSet rasterize_union(const PointSet& a, const PointSet& b, const GridSpec& grid) {
  std::vector<std::pair<long, long>> cells;
  cells.reserve(a.size() + b.size());
  auto add = [&](const PointSet& ps) {
    for (const auto& p : ps.points) {
      const long h = static_cast<long>(std::floor(p.x() + 0.5));
      const long w = static_cast<long>(std::floor(p.y() + 0.5));
      if (h < 0 || w < 0 || h > grid.height || w > grid.width) {
        throw OutOfBoundsError("rasterize_union: point (" + std::to_string(p.x()) + ", " +
                               std::to_string(p.y()) + ") lies outside the grid");
      }
      cells.emplace_back(h, w);
    }
  };
  add(a);
  add(b);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  PointSet out;
  out.points.reserve(cells.size());
  for (const auto& [h, w] : cells)
    out.points.emplace_back(static_cast<double>(h), static_cast<double>(w));
  return out;
}

PointSet deduplicate(const PointSet& ps) {
  std::vector<std::size_t> order(ps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto key = [&](std::size_t i) { return std::make_pair(ps[i].x(), ps[i].y()); };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return key(l) < key(r); });
  std::vector<bool> keep(ps.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || key(order[k]) != key(order[k - 1])) keep[order[k]] = true;
  }
  PointSet out;
  out.source_id = ps.source_id;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (keep[i]) out.points.push_back(ps[i]);
  return out;
}

void require_shape(const PointSet& ps) {
  if (ps.size() < 3) throw DegenerateError("shape needs at least three points");
  const Vec2 c = centroid(ps);
  double scale = 0.0;
  for (const auto& p : ps.points) scale = std::max(scale, (p - c).norm());
  if (scale == 0.0) throw DegenerateError("shape points are all coincident");
  // second moment eigenvalue ratio detects collinearity independent of scale
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : ps.points) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  if (eig.eigenvalues()(0) <= 1e-12 * eig.eigenvalues()(1)) {
    throw DegenerateError("shape points are collinear");
  }
}

}  // namespace aggorient
