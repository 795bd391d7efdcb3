#include "aggorient/orientation.hpp"

#include <cmath>
#include <vector>

#include "aggorient/error.hpp"
#include "aggorient/shapecat.hpp"

namespace aggorient {
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

Vec2 aggregation_center(const PointSet& z, const PairCorrespondence& pc) {
  std::vector<unsigned char> seen(z.size(), 0);
  for (const auto& [i, k] : pc.mu_x.pairs) {
    if (k >= z.size()) throw InvalidCorrespondenceError("aggregation_center: index out of range");
    seen[k] |= 1;
  }
  for (const auto& [j, k] : pc.mu_y.pairs) {
    if (k >= z.size()) throw InvalidCorrespondenceError("aggregation_center: index out of range");
    seen[k] |= 2;
  }
  Vec2 sum = Vec2::Zero();
  std::size_t n = 0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (seen[k] == 3) {
      sum += z[k];
      ++n;
    }
  }
  if (n == 0) throw NoOverlapError("aggregation_center: no aggregate point is shared by both primaries");
  return sum / static_cast<double>(n);
}

double orientation_angle(const RigidTransform& t, const RigidTransform& phi, const Vec2& center) {
  const Vec2 v = t(invert_rigid(phi)(center));
  if (v.norm() < 1e-6) {
    throw UndefinedOrientationError("orientation_angle: center maps onto the reference origin");
  }
  return std::atan2(v.y(), v.x());
}

double normalize_angle(double theta) {
  const double a = std::abs(theta);
  return a <= kHalfPi ? a : kPi - a;
}

AggregationRecord analyze_aggregation(const PointSet& x, const PointSet& y, const PointSet& z,
                                      const CategoryRef& cat_x, const CategoryRef& cat_y,
                                      const AnalyzeOptions& opts) {
  const std::size_t budget = opts.match.max_points;
  const PointSet sx = stage("subsample", [&] { return subsample(x, budget); });
  const PointSet sy = stage("subsample", [&] { return subsample(y, budget); });

  AggregationRecord rec;
  rec.x_id = x.source_id;
  rec.y_id = y.source_id;
  rec.category_x = cat_x.id;
  rec.category_y = cat_y.id;
  rec.symmetric_x = cat_x.symmetric;
  rec.symmetric_y = cat_y.symmetric;

  rec.aspect_x = stage("aspect_x", [&] { return aspect_ratio(x); });
  rec.aspect_y = stage("aspect_y", [&] { return aspect_ratio(y); });
  rec.warn_x = rec.aspect_x < opts.min_aspect_ratio;
  rec.warn_y = rec.aspect_y < opts.min_aspect_ratio;

  const MatchResult mx = stage("align_x", [&] { return match_one_to_one(sx, cat_x.reference, opts.match); });
  const MatchResult my = stage("align_y", [&] { return match_one_to_one(sy, cat_y.reference, opts.match); });
  const PairMatchResult pm = stage("decompose", [&] { return match_two_to_one(x, y, z, opts.match); });
  rec.t_x = mx.transform;
  rec.t_y = my.transform;
  rec.phi_x = pm.phi_x;
  rec.phi_y = pm.phi_y;
  rec.residual_x = mx.residual;
  rec.residual_y = my.residual;
  rec.residual_pair = pm.residual;
  rec.converged = mx.converged && my.converged && pm.converged;

  rec.center = stage("center", [&] { return aggregation_center(z, pm.correspondence); });
  rec.theta_x = stage("orient_x", [&] { return orientation_angle(rec.t_x, rec.phi_x, rec.center); });
  rec.theta_y = stage("orient_y", [&] { return orientation_angle(rec.t_y, rec.phi_y, rec.center); });
  rec.theta_x_norm = cat_x.symmetric ? normalize_angle(rec.theta_x) : rec.theta_x;
  rec.theta_y_norm = cat_y.symmetric ? normalize_angle(rec.theta_y) : rec.theta_y;
  return rec;
}

}  // namespace aggorient
