#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "aggorient/geometry.hpp"

namespace aggorient {

/// Binary correspondence between a source set and a target set, stored as the
/// sorted list of (source index, target index) pairs with value one.
struct Correspondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  bool empty() const noexcept { return pairs.empty(); }
  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

/// Correspondences of two primaries into one aggregate.
struct PairCorrespondence {
  Correspondence mu_x;  // X -> Z
  Correspondence mu_y;  // Y -> Z

  friend bool operator==(const PairCorrespondence&, const PairCorrespondence&) = default;
};

/// True when every source row and every target column carries at least one pair.
bool covers(const Correspondence& mu, std::size_t n_source, std::size_t n_target);

/// Every X row and Y row is covered, and every Z column is covered by either side.
bool covers(const PairCorrespondence& pc, std::size_t n_x, std::size_t n_y, std::size_t n_z);

struct MatchOptions {
  std::size_t max_iterations = 200;
  double tolerance = 1e-8;
  /// Point budget. match_one_to_one rejects larger inputs; match_two_to_one
  /// searches on subsamples of this size and refines on the full sets.
  std::size_t max_points = 200;
  /// Equally spaced starting rotations per primary in the two-to-one search.
  std::size_t pair_start_angles = 8;
  /// Coarse two-to-one solutions carried into the full-resolution refinement.
  std::size_t refine_candidates = 4;
  /// Both sets at or below this size are solved exactly by branch and bound.
  std::size_t exact_limit = 6;
};

struct MatchResult {
  Correspondence correspondence;
  RigidTransform transform;
  double residual = 0.0;  // d_D of the returned correspondence
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // incumbent objective per iteration, nonincreasing
};

struct PairMatchResult {
  PairCorrespondence correspondence;
  RigidTransform phi_x;
  RigidTransform phi_y;
  double residual = 0.0;  // d_D(X, Z; mu_x) + d_D(Y, Z; mu_y), on the subsamples
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// (sum over pairs of |t(x_i) - target_j|^2)^(1/2).
double set_distance(const PointSet& ps, const PointSet& target, const Correspondence& mu,
                    const RigidTransform& t);

/// Frobenius discrepancy |D(X) - mu D(X0) mu^T|_F between a source distance
/// matrix and the correspondence-pulled-back target distance matrix.
double matrix_discrepancy(const DistanceMatrix& d_source, const DistanceMatrix& d_target,
                          const Correspondence& mu);

/// Least-squares rigid transform t with t(x_i) ~ target_j over the pairs of mu.
///
/// Rotation comes from the two-argument arctangent of the summed cross and dot
/// products of correspondence-centered coordinates; the translation then maps
/// the source pair centroid onto the target pair centroid.
RigidTransform estimate_rigid(const PointSet& ps, const PointSet& target, const Correspondence& mu);

/// Closed-form (phi_x, phi_y) for the two-to-one least-squares problem. The
/// objective separates, so each transform is the one-to-one estimate of its block.
std::pair<RigidTransform, RigidTransform> estimate_pair_rigid(const PointSet& x, const PointSet& y,
                                                              const PointSet& z,
                                                              const PairCorrespondence& pc);

/// Estimates the correspondence minimising d_D(ps, reference; mu) and the
/// rigid transform it induces.
MatchResult match_one_to_one(const PointSet& ps, const PointSet& reference,
                             const MatchOptions& opts = {});

/// Estimates (mu_x, mu_y) for z ~ phi_x(x) u phi_y(y) and the two transforms.
///
/// A multi-start alternating search runs on farthest-point subsamples of at
/// most max_points points; the best few coarse solutions are then refined on
/// the full sets and the one with the smallest summed squared pair distance
/// is kept. The returned correspondence indexes the full input sets.
PairMatchResult match_two_to_one(const PointSet& x, const PointSet& y, const PointSet& z,
                                 const MatchOptions& opts = {});

/// Exact minimiser of d_D over all coverage-feasible binary correspondences,
/// by depth-first branch and bound over the target subset assigned to each
/// source row. Only tractable for a handful of points per set (target size is
/// capped at 10). An incumbent, when given, seeds the bound and is returned
/// unless something strictly better exists.
Correspondence exact_correspondence(const DistanceMatrix& d_source, const DistanceMatrix& d_target,
                                    const Correspondence* incumbent = nullptr);

}  // namespace aggorient
