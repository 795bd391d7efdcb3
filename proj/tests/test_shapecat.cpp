#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "aggorient/error.hpp"
#include "aggorient/shapecat.hpp"
#include "aggorient/simgen.hpp"

using namespace aggorient;

namespace {

/// Filled ellipse raster with semi-axes a, b (pixels) and a radially jittered
/// boundary, then moved by a random rigid motion.
PointSet blob(double a, double b, std::mt19937_64& rng, double jitter = 0.03) {
  std::normal_distribution<double> n(0.0, jitter);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), shift(-100.0, 100.0);
  std::vector<double> bump(16);
  for (auto& e : bump) e = n(rng);
  PointSet ps;
  const int ra = static_cast<int>(std::ceil(a * 1.2)), rb = static_cast<int>(std::ceil(b * 1.2));
  for (int i = -ra; i <= ra; ++i) {
    for (int j = -rb; j <= rb; ++j) {
      const double phi = std::atan2(j, i) + kPi;
      const auto bin = std::min<std::size_t>(15, static_cast<std::size_t>(phi / kTwoPi * 16));
      if (i * i / (a * a) + j * j / (b * b) <= 1.0 + bump[bin]) ps.points.emplace_back(i, j);
    }
  }
  return apply_rigid(RigidTransform(Vec2(shift(rng), shift(rng)), ang(rng)), ps);
}

PointSet ellipse_boundary(double a, double b, std::size_t n, double phase = 0.0) {
  PointSet ps;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = kTwoPi * (static_cast<double>(k) + phase) / static_cast<double>(n);
    ps.points.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  return ps;
}

/// Fraction of shapes whose label agrees with the truth under the best
/// one-to-one relabeling (k <= 3 here, so all permutations are tried).
double agreement(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& truth, std::size_t k) {
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hit += perm[labels[i]] == truth[i] ? 1 : 0;
    best = std::max(best, static_cast<double>(hit) / static_cast<double>(labels.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.count(a[i]) && ab[a[i]] != b[i]) return false;
    if (ba.count(b[i]) && ba[b[i]] != a[i]) return false;
    ab[a[i]] = b[i];
    ba[b[i]] = a[i];
  }
  return true;
}

}  // namespace

TEST_CASE("shape distance of identical and moved shapes") {
  std::mt19937_64 rng(1);
  const PointSet a = blob(20, 9, rng);
  const PointSet sa = subsample(a, 120);
  CHECK(pairwise_shape_distance(sa, sa) < 1e-9);
  const PointSet moved = apply_rigid(RigidTransform(Vec2(13.5, -2.25), 2.1), sa);
  CHECK(pairwise_shape_distance(sa, moved) < 1e-3);
}

TEST_CASE("circle versus ellipse distance dominates same-shape distance") {
  const double r = 10.0, a = r * std::sqrt(2.0), b = r / std::sqrt(2.0);  // equal area, 2:1
  const PointSet ellipse = ellipse_boundary(a, b, 50);
  const PointSet ellipse_moved = apply_rigid(RigidTransform(Vec2(4, 7), 0.8), ellipse_boundary(a, b, 50));
  const PointSet circle = ellipse_boundary(r, r, 50);
  const double same = pairwise_shape_distance(ellipse, ellipse_moved);
  const double diff = pairwise_shape_distance(circle, ellipse);
  CHECK(diff > 0.0);
  CHECK(diff >= 10.0 * same);
}

TEST_CASE("aspect_ratio") {
  PointSet disk, ell;
  for (int i = -30; i <= 30; ++i) {
    for (int j = -30; j <= 30; ++j) {
      if (i * i + j * j <= 900) disk.points.emplace_back(i, j);
      if (i * i / 100.0 + j * j / 25.0 <= 1.0) ell.points.emplace_back(i, j);
    }
  }
  CHECK(aspect_ratio(disk) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(aspect_ratio(ell) - 2.0) < 0.1);
  const PointSet turned = apply_rigid(RigidTransform(Vec2(3, 3), 0.7), ell);
  CHECK(std::abs(aspect_ratio(turned) - aspect_ratio(ell)) < 1e-6);
  CHECK_THROWS_AS(aspect_ratio(PointSet({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)})), DegenerateError);
}

TEST_CASE("k_medoids objective never increases and matches its labels") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    PointSet pts;
    for (int i = 0; i < 40; ++i) pts.points.emplace_back(u(rng) + (i % 3) * 20.0, u(rng));
    const Eigen::MatrixXd d = distance_matrix(pts);
    for (std::size_t k = 1; k <= 4; ++k) {
      const KMedoidsResult r = k_medoids(d, k);
      for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
      double cost = 0.0;
      for (std::size_t i = 0; i < 40; ++i) {
        double nearest = INFINITY;
        for (auto m : r.medoids) nearest = std::min(nearest, d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
        CHECK(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.medoids[r.labels[i]])) == nearest);
        cost += nearest;
      }
      CHECK(r.cost == doctest::Approx(cost));
    }
  }
  CHECK_THROWS(k_medoids(Eigen::MatrixXd::Zero(3, 3), 0));
  CHECK_THROWS(k_medoids(Eigen::MatrixXd::Zero(3, 3), 4));
}

TEST_CASE("representative is the brute-force argmin of summed distance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 20);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(30, 30);
    for (int i = 0; i < 30; ++i)
      for (int j = i + 1; j < 30; ++j) d(i, j) = d(j, i) = std::round(u(rng) * 4.0);  // many ties
    std::vector<std::size_t> members(30);
    std::iota(members.begin(), members.end(), 0);
    std::shuffle(members.begin(), members.end(), rng);
    members.resize(size(rng));
    std::size_t best = 0;
    double best_sum = INFINITY;
    for (std::size_t m = 0; m < 30; ++m) {
      if (std::find(members.begin(), members.end(), m) == members.end()) continue;
      double s = 0.0;
      for (auto o : members) s += d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(o));
      if (s < best_sum) {
        best_sum = s;
        best = m;
      }
    }
    CHECK(select_representative(d, members) == best);
  }
}

TEST_CASE("clustering_aic") {
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 3, 4, 1, 0, 2, 3, 3, 2, 0, 1, 4, 3, 1, 0;
  KMedoidsResult fit;
  fit.medoids = {0, 2};
  fit.labels = {0, 0, 1, 1};
  // SSE = 0 + 1 + 0 + 1
  CHECK(clustering_sse(d, fit) == 2.0);
  CHECK(clustering_aic(d, fit) == doctest::Approx(4.0 * std::log(2.0 / 4.0) + 4.0));
}

TEST_CASE("noisy copies of one shape form a single category") {
  SimParams p = SimParams::with_ratios(2.2, 2.2);
  p.n_cases = 30;
  p.seed = 5;
  std::vector<PointSet> shapes;
  for (const SimCase& c : simulate_batch(p)) shapes.push_back(c.x);
  ClusterOptions opts;
  opts.match.max_points = 60;
  const ClusteringResult res = cluster_shapes(shapes, 3, opts);
  REQUIRE(res.categories.size() == 1);
  CHECK(res.categories[0].members.size() == 30);
  CHECK(res.categories[0].mean_aspect_ratio == doctest::Approx(2.2).epsilon(0.1));

  // with the split guard off the choice is the plain AIC minimum
  opts.min_split_ratio = 1.0;
  const ClusteringResult plain = cluster_with_distances(shapes, res.distances, 3, opts);
  const auto argmin = static_cast<std::size_t>(std::min_element(plain.aic.begin(), plain.aic.end()) - plain.aic.begin());
  CHECK(plain.categories.size() == argmin + 1);
}

TEST_CASE("circles and elongated ellipses separate into two categories") {
  SimParams p = SimParams::with_ratios(1.0, 2.2);
  p.n_cases = 20;
  p.seed = 6;
  std::vector<PointSet> shapes;
  std::vector<std::size_t> truth;
  for (const SimCase& c : simulate_batch(p)) {
    shapes.push_back(c.x);
    truth.push_back(0);
    shapes.push_back(c.y);
    truth.push_back(1);
  }
  ClusterOptions opts;
  opts.match.max_points = 80;
  const ClusteringResult res = cluster_shapes(shapes, 3, opts);
  REQUIRE(res.categories.size() == 2);
  CHECK(agreement(res.labels, truth, 2) >= 0.9);
  for (const auto& c : res.categories) {
    CHECK(std::find(c.member_ids.begin(), c.member_ids.end(), c.representative_id) != c.member_ids.end());
    double vx = 0.0, vy = 0.0;
    for (const auto& q : c.reference.points) {
      vx += q.x() * q.x();
      vy += q.y() * q.y();
    }
    CHECK(vx >= vy);
  }
}

TEST_CASE("clustering ignores rigid motions of the inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), shift(-50.0, 50.0);
  ClusterOptions opts;
  opts.match.max_points = 40;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PointSet> shapes;
    for (int i = 0; i < 12; ++i) {
      const double r = i % 3 == 0 ? 1.0 : (i % 3 == 1 ? 1.6 : 2.4);
      shapes.push_back(subsample(blob(7.0 * std::sqrt(r) * 1.5, 7.0 / std::sqrt(r) * 1.5, rng), 40));
    }
    std::vector<PointSet> moved;
    for (const auto& s : shapes) moved.push_back(apply_rigid(RigidTransform(Vec2(shift(rng), shift(rng)), ang(rng)), s));
    const ClusteringResult a = cluster_shapes(shapes, 3, opts);
    const ClusteringResult b = cluster_shapes(moved, 3, opts);
    CHECK(a.categories.size() == b.categories.size());
    CHECK(same_partition(a.labels, b.labels));
  }
}

TEST_CASE("cluster_shapes argument checks") {
  std::vector<PointSet> two{PointSet({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}), PointSet({Vec2(0, 0), Vec2(2, 0), Vec2(0, 1)})};
  CHECK_THROWS(cluster_shapes(two, 0));
  CHECK_THROWS(cluster_shapes(two, 3));
}
