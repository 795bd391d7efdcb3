#pragma once

#include <string>

#include "aggorient/correspondence.hpp"
#include "aggorient/geometry.hpp"

namespace aggorient {

/// Reference shape of a category plus its symmetry flag.
struct CategoryRef {
  std::string id;
  PointSet reference;
  bool symmetric = true;
};

/// Everything estimated for one (X, Y, Z) aggregation observation.
struct AggregationRecord {
  std::string x_id;
  std::string y_id;
  std::string category_x;
  std::string category_y;
  RigidTransform phi_x;
  RigidTransform phi_y;
  RigidTransform t_x;  // aligns X to its category reference
  RigidTransform t_y;
  Vec2 center = Vec2::Zero();
  double theta_x = 0.0;  // (-pi, pi]
  double theta_y = 0.0;
  double theta_x_norm = 0.0;  // in [0, pi/2] when the category is symmetric
  double theta_y_norm = 0.0;
  bool symmetric_x = true;
  bool symmetric_y = true;
  double aspect_x = 0.0;
  double aspect_y = 0.0;
  bool warn_x = false;  // aspect ratio below the reliability threshold
  bool warn_y = false;
  double residual_x = 0.0;
  double residual_y = 0.0;
  double residual_pair = 0.0;
  bool converged = true;
};

/// Mean of the aggregate points covered by both mu_x and mu_y.
Vec2 aggregation_center(const PointSet& z, const PairCorrespondence& pc);

/// Polar angle, in (-pi, pi], of t(phi^-1(center)).
double orientation_angle(const RigidTransform& t, const RigidTransform& phi, const Vec2& center);

/// Folds theta in (-pi, pi] onto its four-fold representative in [0, pi/2].
double normalize_angle(double theta);

struct AnalyzeOptions {
  MatchOptions match;
  double min_aspect_ratio = 1.4;
};

/// Full per-observation pipeline: align each primary to its reference,
/// decompose the aggregate, locate the aggregation center and measure both
/// orientation angles. Every stage failure is rethrown as a StageError.
AggregationRecord analyze_aggregation(const PointSet& x, const PointSet& y, const PointSet& z,
                                      const CategoryRef& cat_x, const CategoryRef& cat_y,
                                      const AnalyzeOptions& opts = {});

}  // namespace aggorient
