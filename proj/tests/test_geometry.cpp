#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "aggorient/error.hpp"
#include "aggorient/geometry.hpp"

using namespace aggorient;

namespace {

PointSet random_set(std::mt19937_64& rng, std::size_t n, double spread = 50.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  PointSet ps;
  for (std::size_t i = 0; i < n; ++i) ps.points.emplace_back(u(rng), u(rng));
  return ps;
}

RigidTransform random_transform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-100.0, 100.0), a(0.0, kTwoPi);
  return RigidTransform(Vec2(c(rng), c(rng)), a(rng));
}

PointSet disk_raster(double r) {
  PointSet ps;
  const int n = static_cast<int>(std::ceil(r));
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      if (i * i + j * j <= r * r) ps.points.emplace_back(i, j);
    }
  }
  return ps;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("apply_rigid shifts then rotates") {
  PointSet ps({Vec2(1.5, -2.0), Vec2(0.0, 3.0), Vec2(7.0, 7.0)});
  const PointSet same = apply_rigid(RigidTransform::identity(), ps);
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK((same[i] - ps[i]).norm() == 0.0);

  const PointSet q = apply_rigid(RigidTransform(Vec2::Zero(), kHalfPi), PointSet({Vec2(1.0, 0.0)}));
  CHECK(std::abs(q[0].x()) < 1e-15);
  CHECK(q[0].y() == doctest::Approx(1.0));

  const PointSet o = apply_rigid(RigidTransform(Vec2(2.0, 3.0), kHalfPi), PointSet({Vec2(2.0, 3.0)}));
  CHECK(o[0].norm() == 0.0);
}

TEST_CASE("angles are stored in [0, 2pi)") {
  CHECK(RigidTransform(Vec2::Zero(), -kHalfPi).angle == doctest::Approx(1.5 * kPi));
  CHECK(RigidTransform(Vec2::Zero(), 5 * kPi).angle == doctest::Approx(kPi));
  CHECK(wrap_two_pi(kTwoPi) == 0.0);
  CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_two_pi(a);
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
    const double p = wrap_pi(a);
    CHECK(p > -kPi);
    CHECK(p <= kPi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
    CHECK(std::sin(p) == doctest::Approx(std::sin(a)));
  }
}

TEST_CASE("invert_rigid") {
  const RigidTransform id = invert_rigid(RigidTransform::identity());
  CHECK(id.translation.norm() == 0.0);
  CHECK(id.angle == 0.0);

  const RigidTransform back = invert_rigid(RigidTransform(Vec2(1.0, 0.0), 0.0));
  CHECK((back(Vec2::Zero()) - Vec2(1.0, 0.0)).norm() < 1e-15);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const RigidTransform t = random_transform(rng);
    const PointSet ps = random_set(rng, 30);
    const PointSet round = apply_rigid(invert_rigid(t), apply_rigid(t, ps));
    double worst = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) worst = std::max(worst, (round[i] - ps[i]).norm());
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("compose applies inner first") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform a = random_transform(rng), b = random_transform(rng);
    const RigidTransform ab = compose(a, b);
    const Vec2 x(3.0 * trial, -1.0);
    CHECK((ab(x) - a(b(x))).norm() < 1e-9);
  }
}

TEST_CASE("distance_matrix") {
  const DistanceMatrix d = distance_matrix(PointSet({Vec2(0, 0), Vec2(3, 0), Vec2(0, 4)}));
  Eigen::Matrix3d expected;
  expected << 0, 3, 4, 3, 0, 5, 4, 5, 0;
  CHECK(max_abs_diff(d, expected) == 0.0);

  const DistanceMatrix one = distance_matrix(PointSet({Vec2(2, 2)}));
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == 0.0);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const PointSet ps = random_set(rng, 25);
    const DistanceMatrix dm = distance_matrix(ps);
    CHECK(max_abs_diff(dm, distance_matrix(apply_rigid(random_transform(rng), ps))) < 1e-9);
    CHECK(max_abs_diff(dm, dm.transpose()) == 0.0);
    bool triangle = true;
    for (Eigen::Index i = 0; i < dm.rows(); ++i) {
      CHECK(dm(i, i) == 0.0);
      for (Eigen::Index j = 0; j < dm.rows(); ++j) {
        for (Eigen::Index k = 0; k < dm.rows(); ++k) triangle = triangle && dm(i, j) <= dm(i, k) + dm(k, j) + 1e-12;
      }
    }
    CHECK(triangle);
  }
}

TEST_CASE("mds_embed reproduces distances with the major axis on x") {
  const PointSet tri({Vec2(0, 0), Vec2(3, 0), Vec2(0, 4)});
  const DistanceMatrix d = distance_matrix(tri);
  CHECK(max_abs_diff(distance_matrix(mds_embed(d)), d) < 1e-6);

  PointSet ellipse;
  for (int k = 0; k < 60; ++k) {
    const double a = kTwoPi * k / 60.0;
    ellipse.points.emplace_back(10.0 * std::cos(a), 4.0 * std::sin(a));
  }
  const PointSet emb = mds_embed(distance_matrix(apply_rigid(RigidTransform(Vec2(5, 5), 1.0), ellipse)));
  double vx = 0.0, vy = 0.0;
  for (const auto& p : emb.points) {
    vx += p.x() * p.x();
    vy += p.y() * p.y();
  }
  CHECK(vx >= vy);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet ps = random_set(rng, 20);
    const DistanceMatrix dm = distance_matrix(ps);
    CHECK((distance_matrix(mds_embed(dm)) - dm).norm() < 1e-6);
  }
}

TEST_CASE("mds_embed signs are fixed") {
  PointSet ps;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 80; ++i) ps.points.emplace_back(std::exp(n(rng)) * 3.0, n(rng));
  const PointSet a = mds_embed(distance_matrix(ps));
  const PointSet b = mds_embed(distance_matrix(apply_rigid(RigidTransform(Vec2(1, 2), 2.5), ps)));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() < 1e-6);
  double m3 = 0.0;
  for (const auto& p : a.points) m3 += p.x() * p.x() * p.x();
  CHECK(m3 >= 0.0);
}

TEST_CASE("mds_embed rejects non-planar distances") {
  // regular tetrahedron
  Eigen::Matrix4d d = Eigen::Matrix4d::Ones() - Eigen::Matrix4d::Identity();
  CHECK_THROWS_AS(mds_embed(d), NonPlanarError);
}

TEST_CASE("subsample") {
  std::mt19937_64 rng(2);
  const PointSet small = random_set(rng, 10);
  const PointSet same = subsample(small, 20);
  REQUIRE(same.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(same[i] == small[i]);

  PointSet line;
  for (int i = 0; i < 100; ++i) line.points.emplace_back(i, 2.0 * i);
  const PointSet three = subsample(line, 3);
  REQUIRE(three.size() == 3);
  auto has = [&](const Vec2& v) {
    return std::any_of(three.points.begin(), three.points.end(), [&](const Vec2& p) { return p == v; });
  };
  CHECK(has(Vec2(0, 0)));
  CHECK(has(Vec2(99, 198)));
}

TEST_CASE("subsample matches a direct greedy farthest-point pass") {
  const PointSet disk = disk_raster(12.0);
  const std::size_t k = 50;
  const PointSet got = subsample(disk, k);
  REQUIRE(got.size() == k);

  // naive O(n^2 k) oracle: seed at the point nearest the centroid, then add
  // the point farthest from the chosen set, lowest index on ties
  Vec2 c = Vec2::Zero();
  for (const auto& p : disk.points) c += p;
  c /= static_cast<double>(disk.size());
  std::size_t seed = 0;
  for (std::size_t i = 1; i < disk.size(); ++i) {
    if ((disk[i] - c).squaredNorm() < (disk[seed] - c).squaredNorm()) seed = i;
  }
  std::vector<std::size_t> chosen{seed};
  while (chosen.size() < k) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < disk.size(); ++i) {
      double d = INFINITY;
      for (std::size_t j : chosen) d = std::min(d, (disk[i] - disk[j]).squaredNorm());
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  std::set<std::pair<double, double>> want, have;
  for (std::size_t i : chosen) want.emplace(disk[i].x(), disk[i].y());
  for (const auto& p : got.points) have.emplace(p.x(), p.y());
  CHECK(want == have);

  double dmin = INFINITY;
  for (std::size_t i = 0; i < got.size(); ++i) {
    for (std::size_t j = i + 1; j < got.size(); ++j) dmin = std::min(dmin, (got[i] - got[j]).norm());
  }
  // hexagonal packing spacing for k points covering the disk area
  const double hex = std::sqrt(2.0 * kPi * 12.0 * 12.0 / (std::sqrt(3.0) * static_cast<double>(k)));
  CHECK(dmin >= 0.5 * hex);
}

TEST_CASE("rasterize_union") {
  const GridSpec grid{100, 100};
  const PointSet a({Vec2(1.2, 1.7), Vec2(3.5, 4.49), Vec2(10.0, 10.0)});
  const PointSet ua = rasterize_union(a, a, grid);
  std::set<std::pair<double, double>> expect{{1, 2}, {4, 4}, {10, 10}};
  std::set<std::pair<double, double>> got;
  for (const auto& p : ua.points) got.emplace(p.x(), p.y());
  CHECK(got == expect);

  const PointSet b({Vec2(50, 50), Vec2(60, 60)});
  CHECK(rasterize_union(a, b, grid).size() == 5);

  PointSet d1, d2;
  for (const auto& p : disk_raster(8.0).points) {
    d1.points.push_back(p + Vec2(30.3, 30.6));
    d2.points.push_back(p + Vec2(38.1, 33.2));
  }
  std::set<std::pair<long, long>> oracle;
  for (const auto* s : {&d1, &d2}) {
    for (const auto& p : s->points) oracle.emplace(std::lround(std::floor(p.x() + 0.5)), std::lround(std::floor(p.y() + 0.5)));
  }
  const PointSet u = rasterize_union(d1, d2, grid);
  CHECK(u.size() == oracle.size());
  CHECK(u.size() < d1.size() + d2.size());
  CHECK(std::is_sorted(u.points.begin(), u.points.end(), [](const Vec2& l, const Vec2& r) {
    return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
  }));

  CHECK_THROWS_AS(rasterize_union(PointSet({Vec2(101, 0)}), a, grid), OutOfBoundsError);
  CHECK_THROWS_AS(rasterize_union(PointSet({Vec2(-0.6, 0)}), a, grid), OutOfBoundsError);
  CHECK(rasterize_union(PointSet({Vec2(100, 100)}), PointSet({Vec2(0, 0)}), grid).size() == 2);
}

TEST_CASE("deduplicate and require_shape") {
  const PointSet dup({Vec2(0, 0), Vec2(1, 0), Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)});
  const PointSet d = deduplicate(dup);
  CHECK(d.size() == 3);
  CHECK(d[0] == Vec2(0, 0));
  CHECK(d[1] == Vec2(1, 0));
  CHECK(d[2] == Vec2(0, 1));
  CHECK_NOTHROW(require_shape(d));
  CHECK_THROWS_AS(require_shape(PointSet({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)})), DegenerateError);
  CHECK_THROWS_AS(require_shape(PointSet({Vec2(0, 0), Vec2(1, 1)})), DegenerateError);
}
