#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aggorient/correspondence.hpp"
#include "aggorient/geometry.hpp"

namespace aggorient {

/// A group of geometrically similar primaries and its orientation-normalised reference.
struct ShapeCategory {
  std::string id;
  std::vector<std::size_t> members;  // indices into the clustered shape list
  std::vector<std::string> member_ids;
  std::size_t representative = 0;
  std::string representative_id;
  PointSet reference;  // MDS embedding of the representative, major axis on x
  bool symmetric = true;
  double mean_aspect_ratio = 0.0;
};

struct ClusterOptions {
  MatchOptions match;
  std::size_t max_iterations = 100;  // PAM swap passes
  // K is eligible only if every step up to it multiplied the SSE by at most
  // this ratio; 1 leaves the choice to AIC alone
  double min_split_ratio = 0.5;
};

/// Shape distance d_D(a, b): the larger of the two directed match residuals.
/// Inputs above the point budget are farthest-point subsampled first.
double pairwise_shape_distance(const PointSet& a, const PointSet& b, const MatchOptions& opts = {});

/// Symmetric table of pairwise_shape_distance over all shape pairs.
Eigen::MatrixXd shape_distance_table(const std::vector<PointSet>& shapes, const MatchOptions& opts = {});

struct KMedoidsResult {
  std::vector<std::size_t> medoids;
  std::vector<std::size_t> labels;  // index into medoids
  double cost = 0.0;                // sum of distances to assigned medoid
  std::vector<double> trace;        // cost after BUILD and each accepted swap
};

/// PAM (BUILD then best-improvement SWAP) over a precomputed distance table.
KMedoidsResult k_medoids(const Eigen::MatrixXd& dist, std::size_t k, std::size_t max_iterations = 100);

/// Member minimising the summed distance to the other members; lowest index on ties.
std::size_t select_representative(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& members);

/// Sum of squared distances to the assigned medoid.
double clustering_sse(const Eigen::MatrixXd& dist, const KMedoidsResult& fit);

/// N ln(SSE / N) + 2K with SSE the sum of squared medoid distances.
double clustering_aic(const Eigen::MatrixXd& dist, const KMedoidsResult& fit);

struct ClusteringResult {
  std::vector<ShapeCategory> categories;
  std::vector<std::size_t> labels;  // category index per shape
  std::vector<double> aic;          // aic[K-1]
  Eigen::MatrixXd distances;
};

/// Runs k-medoids for K = 1..k_max and keeps the K with the smallest AIC among
/// those whose splits each cut the SSE by min_split_ratio.
ClusteringResult cluster_shapes(const std::vector<PointSet>& shapes, std::size_t k_max,
                                const ClusterOptions& opts = {});

/// Same as cluster_shapes with the distance table already computed.
ClusteringResult cluster_with_distances(const std::vector<PointSet>& shapes,
                                        const Eigen::MatrixXd& dist, std::size_t k_max,
                                        const ClusterOptions& opts = {});

/// Ratio of the principal standard deviations (major over minor).
double aspect_ratio(const PointSet& ps);

}  // namespace aggorient
