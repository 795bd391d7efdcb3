#include "aggorient/shapecat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "aggorient/error.hpp"
#include "aggorient/parallel.hpp"

namespace aggorient {
namespace {

PointSet budgeted(const PointSet& ps, const MatchOptions& opts) {
  return ps.size() > opts.max_points ? subsample(ps, opts.max_points) : ps;
}

double assignment_cost(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& medoids,
                       std::vector<std::size_t>* labels) {
  const auto n = static_cast<std::size_t>(dist.rows());
  double cost = 0.0;
  if (labels) labels->assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[c]));
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    cost += best;
    if (labels) (*labels)[i] = arg;
  }
  return cost;
}

}  // namespace

double pairwise_shape_distance(const PointSet& a, const PointSet& b, const MatchOptions& opts) {
  const PointSet sa = budgeted(a, opts);
  const PointSet sb = budgeted(b, opts);
  const double ab = match_one_to_one(sa, sb, opts).residual;
  const double ba = match_one_to_one(sb, sa, opts).residual;
  return std::max(ab, ba);
}

Eigen::MatrixXd shape_distance_table(const std::vector<PointSet>& shapes, const MatchOptions& opts) {
  const auto n = static_cast<Eigen::Index>(shapes.size());
  std::vector<PointSet> reduced;
  reduced.reserve(shapes.size());
  for (const auto& s : shapes) reduced.push_back(budgeted(s, opts));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  // each worker owns one row of the upper triangle
  parallel_for(shapes.size(), [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = reduced[row];
      const auto& b = reduced[static_cast<std::size_t>(j)];
      d(i, j) = std::max(match_one_to_one(a, b, opts).residual, match_one_to_one(b, a, opts).residual);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  }
  return d;
}

KMedoidsResult k_medoids(const Eigen::MatrixXd& dist, std::size_t k, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(dist.rows());
  if (k < 1) throw std::invalid_argument("k_medoids: k must be at least 1");
  if (k > n) throw std::invalid_argument("k_medoids: more clusters than points");

  KMedoidsResult out;
  // BUILD: greedily add the point that lowers total cost the most
  std::vector<bool> is_medoid(n, false);
  for (std::size_t step = 0; step < k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      auto trial = out.medoids;
      trial.push_back(c);
      const double cost = assignment_cost(dist, trial, nullptr);
      if (cost < best) {
        best = cost;
        arg = c;
      }
    }
    out.medoids.push_back(arg);
    is_medoid[arg] = true;
  }
  out.cost = assignment_cost(dist, out.medoids, &out.labels);
  out.trace.push_back(out.cost);

  // SWAP: best improving (medoid, non-medoid) exchange per pass
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double best = out.cost;
    std::size_t best_slot = k, best_cand = 0;
    for (std::size_t slot = 0; slot < k; ++slot) {
      for (std::size_t c = 0; c < n; ++c) {
        if (is_medoid[c]) continue;
        auto trial = out.medoids;
        trial[slot] = c;
        const double cost = assignment_cost(dist, trial, nullptr);
        if (cost < best - 1e-12 * (1.0 + std::abs(best))) {
          best = cost;
          best_slot = slot;
          best_cand = c;
        }
      }
    }
    if (best_slot == k) break;
    is_medoid[out.medoids[best_slot]] = false;
    is_medoid[best_cand] = true;
    out.medoids[best_slot] = best_cand;
    out.cost = assignment_cost(dist, out.medoids, &out.labels);
    out.trace.push_back(out.cost);
  }
  return out;
}

std::size_t select_representative(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& members) {
  if (members.empty()) throw std::invalid_argument("select_representative: empty cluster");
  std::size_t arg = members.front();
  double best = std::numeric_limits<double>::infinity();
  for (auto n : members) {
    double s = 0.0;
    for (auto o : members) s += dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(n));
    if (s < best || (s == best && n < arg)) {
      best = s;
      arg = n;
    }
  }
  return arg;
}

double clustering_sse(const Eigen::MatrixXd& dist, const KMedoidsResult& fit) {
  double sse = 0.0;
  for (std::size_t i = 0; i < fit.labels.size(); ++i) {
    const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(fit.medoids[fit.labels[i]]));
    sse += d * d;
  }
  return sse;
}

double clustering_aic(const Eigen::MatrixXd& dist, const KMedoidsResult& fit) {
  const auto n = static_cast<double>(dist.rows());
  // identical shapes give SSE = 0; floor keeps the criterion finite
  const double per = std::max(clustering_sse(dist, fit) / n, std::numeric_limits<double>::min());
  return n * std::log(per) + 2.0 * static_cast<double>(fit.medoids.size());
}

ClusteringResult cluster_with_distances(const std::vector<PointSet>& shapes,
                                        const Eigen::MatrixXd& dist, std::size_t k_max,
                                        const ClusterOptions& opts) {
  if (k_max < 1) throw std::invalid_argument("cluster_shapes: k_max must be at least 1");
  if (shapes.size() < k_max) throw std::invalid_argument("cluster_shapes: fewer shapes than k_max");
  if (static_cast<std::size_t>(dist.rows()) != shapes.size()) {
    throw std::invalid_argument("cluster_shapes: distance table does not match shape count");
  }

  ClusteringResult out;
  out.distances = dist;
  KMedoidsResult chosen;
  double best = std::numeric_limits<double>::infinity();
  double prev_sse = 0.0;
  bool admissible = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    KMedoidsResult fit = k_medoids(dist, k, opts.max_iterations);
    const double aic = clustering_aic(dist, fit);
    const double sse = clustering_sse(dist, fit);
    out.aic.push_back(aic);
    // once a split fails to shrink the SSE enough, no larger K is eligible
    if (k > 1 && !(sse <= opts.min_split_ratio * prev_sse)) admissible = false;
    prev_sse = sse;
    if (admissible && aic < best) {
      best = aic;
      chosen = std::move(fit);
    }
  }

  // categories ordered by their lowest member index for stable labels
  const std::size_t k = chosen.medoids.size();
  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t i = 0; i < shapes.size(); ++i) groups[chosen.labels[i]].push_back(i);
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  out.labels.assign(shapes.size(), 0);
  for (std::size_t c = 0; c < k; ++c) {
    ShapeCategory cat;
    cat.id = "category" + std::to_string(c + 1);
    cat.members = groups[c];
    double ar = 0.0;
    for (auto m : cat.members) {
      out.labels[m] = c;
      cat.member_ids.push_back(shapes[m].source_id.empty() ? std::to_string(m) : shapes[m].source_id);
      ar += aspect_ratio(shapes[m]);
    }
    cat.mean_aspect_ratio = ar / static_cast<double>(cat.members.size());
    cat.representative = select_representative(dist, cat.members);
    const auto& rep = shapes[cat.representative];
    cat.representative_id = rep.source_id.empty() ? std::to_string(cat.representative) : rep.source_id;
    const PointSet reduced =
        rep.size() > opts.match.max_points ? subsample(rep, opts.match.max_points) : rep;
    cat.reference = mds_embed(distance_matrix(reduced));
    cat.reference.source_id = cat.id;
    out.categories.push_back(std::move(cat));
  }
  return out;
}

ClusteringResult cluster_shapes(const std::vector<PointSet>& shapes, std::size_t k_max,
                                const ClusterOptions& opts) {
  if (k_max < 1) throw std::invalid_argument("cluster_shapes: k_max must be at least 1");
  if (shapes.size() < k_max) throw std::invalid_argument("cluster_shapes: fewer shapes than k_max");
  return cluster_with_distances(shapes, shape_distance_table(shapes, opts.match), k_max, opts);
}

double aspect_ratio(const PointSet& ps) {
  if (ps.size() < 3) throw DegenerateError("aspect_ratio: need at least three points");
  const Vec2 c = centroid(ps);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : ps.points) cov += (p - c) * (p - c).transpose();
  cov /= static_cast<double>(ps.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double minor = eig.eigenvalues()(0);
  const double major = eig.eigenvalues()(1);
  if (minor <= 1e-12 * major || major <= 0.0) {
    throw DegenerateError("aspect_ratio: zero minor-axis variance");
  }
  return std::sqrt(major / minor);
}

}  // namespace aggorient
