#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "aggorient/error.hpp"
#include "aggorient/shapecat.hpp"
#include "aggorient/simgen.hpp"

using namespace aggorient;

namespace {

using Cell = std::pair<long, long>;

std::set<Cell> cells_of(const PointSet& ps) {
  std::set<Cell> out;
  for (const auto& p : ps.points) out.emplace(static_cast<long>(std::floor(p.x() + 0.5)), static_cast<long>(std::floor(p.y() + 0.5)));
  return out;
}

AggregationRecord record_from(const SimTruth& t) {
  AggregationRecord r;
  r.t_x = t.t_x;
  r.t_y = t.t_y;
  r.phi_x = t.phi_x;
  r.phi_y = t.phi_y;
  r.center = t.center;
  r.theta_x = t.theta_x;
  r.theta_y = t.theta_y;
  return r;
}

bool same_points(const PointSet& a, const PointSet& b) { return a.points == b.points; }

}  // namespace

TEST_CASE("with_ratios parameterization") {
  const SimParams p = SimParams::with_ratios(1.4, 2.2);
  CHECK(std::exp(p.nu_b_x) == doctest::Approx(5.0));
  CHECK(std::exp(p.nu_a_x) == doctest::Approx(1.4 * 5.0));
  CHECK(std::exp(p.nu_a_y) == doctest::Approx(2.2 * std::exp(p.nu_b_y)));
  CHECK(p.r_x == 1.4);
  CHECK(p.r_y == 2.2);
  CHECK_NOTHROW(p.validate());

  SimParams bad = p;
  bad.sigma2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.sigma_e2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.n_cases = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.contact = ContactMode::Directed;
  bad.contact_radius = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("minor axis draws stay near 5 units") {
  SimParams p = SimParams::with_ratios(2.2, 2.2);
  p.n_cases = 200;
  p.seed = 31;
  std::size_t inside = 0, total = 0;
  for (const SimCase& c : simulate_batch(p)) {
    for (double b : {c.truth.b_x, c.truth.b_y}) {
      inside += (b >= 4.5 && b <= 5.5) ? 1 : 0;
      ++total;
    }
    CHECK(c.truth.a_x / c.truth.b_x == doctest::Approx(2.2).epsilon(0.15));
  }
  CHECK(static_cast<double>(inside) / static_cast<double>(total) >= 0.99);
}

TEST_CASE("aggregate is the exact union of the placed primaries") {
  SimParams p = SimParams::with_ratios(2.2, 1.4);
  p.n_cases = 20;
  p.seed = 32;
  for (const SimCase& c : simulate_batch(p)) {
    std::set<Cell> want = cells_of(apply_rigid(c.truth.phi_x, c.x));
    const std::set<Cell> wy = cells_of(apply_rigid(c.truth.phi_y, c.y));
    std::set<Cell> both;
    std::set_intersection(want.begin(), want.end(), wy.begin(), wy.end(), std::inserter(both, both.end()));
    want.insert(wy.begin(), wy.end());
    const std::set<Cell> got = cells_of(c.z);
    CHECK(got.size() == c.z.size());
    CHECK(got == want);

    CHECK(c.truth.overlap == both.size());
    CHECK(c.truth.overlap > 0);
    Vec2 mean = Vec2::Zero();
    for (const auto& [i, j] : both) mean += Vec2(static_cast<double>(i), static_cast<double>(j));
    mean /= static_cast<double>(both.size());
    CHECK((mean - c.truth.center).norm() < 1e-9);
    for (const auto& [i, j] : got) {
      CHECK(i >= 0);
      CHECK(j >= 0);
      CHECK(i <= p.grid.height);
      CHECK(j <= p.grid.width);
    }
  }
}

TEST_CASE("truth is consistent with the generated shapes") {
  SimParams p = SimParams::with_ratios(2.2, 2.2);
  p.n_cases = 10;
  p.seed = 33;
  for (const SimCase& c : simulate_batch(p)) {
    const SimTruth& t = c.truth;
    CHECK(t.t_x.angle >= 0.0);
    CHECK(t.t_x.angle <= kHalfPi);
    const double a = t.a_x * p.pixels_per_unit, b = t.b_x * p.pixels_per_unit;
    for (const auto& q : apply_rigid(t.t_x, c.x).points) {
      // boundary noise is a few tenths at most
      CHECK(q.x() * q.x() / (a * a) + q.y() * q.y() / (b * b) <= 1.6);
    }
    CHECK(std::find(c.x.points.begin(), c.x.points.end(), t.contact_x) != c.x.points.end());
    CHECK(std::find(c.y.points.begin(), c.y.points.end(), t.contact_y) != c.y.points.end());
    // contacts land on a common spot, X's center to the left, Y's to the right
    CHECK((t.phi_x(t.contact_x) - t.phi_y(t.contact_y)).norm() < 1e-9);
    const Vec2 cx = t.phi_x(t.t_x.translation) - t.phi_x(t.contact_x);
    const Vec2 cy = t.phi_y(t.t_y.translation) - t.phi_y(t.contact_y);
    CHECK(std::abs(cx.y()) < 1e-6 * std::max(1.0, cx.norm()));
    CHECK(cx.x() <= 0.0);
    CHECK(std::abs(cy.y()) < 1e-6 * std::max(1.0, cy.norm()));
    CHECK(cy.x() >= 0.0);

    CHECK(t.theta_x == doctest::Approx(orientation_angle(t.t_x, t.phi_x, t.center)));
    CHECK(t.theta_y == doctest::Approx(orientation_angle(t.t_y, t.phi_y, t.center)));
    CHECK(c.x.source_id == c.id + "/x");
    CHECK(c.z.source_id == c.id + "/z");
  }
}

TEST_CASE("aspect ratio of generated primaries concentrates near r_X") {
  SimParams p = SimParams::with_ratios(2.2, 1.4);
  p.n_cases = 200;
  p.seed = 34;
  double sum = 0.0;
  for (const SimCase& c : simulate_batch(p)) sum += aspect_ratio(c.x);
  CHECK(std::abs(sum / 200.0 - 2.2) <= 0.05 * 2.2);
}

TEST_CASE("batches are deterministic and seeds give distinct streams") {
  SimParams p = SimParams::with_ratios(1.4, 2.2);
  p.n_cases = 4;
  p.n_replicates = 2;
  p.seed = 35;
  const auto a = simulate_batch(p);
  const auto b = simulate_batch(p);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(same_points(a[i].x, b[i].x));
    CHECK(same_points(a[i].y, b[i].y));
    CHECK(same_points(a[i].z, b[i].z));
    CHECK(a[i].truth.theta_x == b[i].truth.theta_x);
    CHECK(a[i].truth.phi_y.translation == b[i].truth.phi_y.translation);
  }
  CHECK(a[5].replicate == 1);
  CHECK(a[5].index == 1);
  CHECK(a[5].id == "r1_c1");
  CHECK_FALSE(same_points(a[0].x, a[1].x));

  p.seed = 36;
  const auto other = simulate_batch(p);
  CHECK_FALSE(same_points(a[0].z, other[0].z));

  p.n_cases = 1;
  p.n_replicates = 1;
  const auto single = simulate_batch(p);
  REQUIRE(single.size() == 1);
  CHECK(single[0].id == "r0_c0");
}

TEST_CASE("directed contacts follow the contact model") {
  SimParams p = SimParams::with_ratios(2.2, 2.2);
  p.n_cases = 40;
  p.seed = 37;
  p.contact = ContactMode::Directed;
  p.contact_model = FourFoldVonMises{0.0, 50.0};
  // gamma = 0 puts the contact on the major axis, so the primaries meet end to end
  std::size_t near_axis = 0;
  for (const SimCase& c : simulate_batch(p)) {
    const Vec2 local = c.truth.t_x(c.truth.contact_x);
    near_axis += std::abs(local.y()) < 0.3 * std::abs(local.x()) ? 1 : 0;
  }
  CHECK(near_axis >= 36);
}

TEST_CASE("evaluate_estimates") {
  SimParams p = SimParams::with_ratios(2.2, 2.2);
  p.n_cases = 3;
  p.seed = 38;
  for (const SimCase& c : simulate_batch(p)) {
    AggregationRecord r = record_from(c.truth);
    EstimateErrors e = evaluate_estimates(c.truth, r, p.pixels_per_unit);
    CHECK(e.t_x_translation == 0.0);
    CHECK(e.t_x_angle == doctest::Approx(0.0));
    CHECK(e.phi_y_translation == 0.0);
    CHECK(e.phi_y_angle == doctest::Approx(0.0));
    CHECK(e.theta_x == doctest::Approx(0.0));
    CHECK(e.theta_y == doctest::Approx(0.0));

    // the half-turn of an ellipse is the same answer
    r.theta_x = wrap_pi(c.truth.theta_x + kPi);
    r.t_x = RigidTransform(c.truth.t_x.translation, c.truth.t_x.angle + kPi);
    const Vec2 m = c.truth.t_x.translation;
    r.phi_x = RigidTransform(2.0 * m - c.truth.phi_x.translation, c.truth.phi_x.angle + kPi);
    e = evaluate_estimates(c.truth, r, p.pixels_per_unit);
    CHECK(e.theta_x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.t_x_angle == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.phi_x_angle == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.phi_x_translation == doctest::Approx(0.0).epsilon(1e-12));

    // a one pixel shift is 0.01 unit^2 at 10 pixels per unit
    r = record_from(c.truth);
    r.t_y = RigidTransform(c.truth.t_y.translation + Vec2(1.0, 0.0), c.truth.t_y.angle);
    r.theta_y = c.truth.theta_y + 0.1;
    e = evaluate_estimates(c.truth, r, p.pixels_per_unit);
    CHECK(e.t_y_translation == doctest::Approx(0.01));
    CHECK(e.theta_y == doctest::Approx(1.0 - std::cos(normalize_angle(c.truth.theta_y + 0.1) - normalize_angle(c.truth.theta_y))));
  }
}

TEST_CASE("reference ellipse") {
  const PointSet ref = ellipse_reference(11.0, 5.0, 10.0);
  CHECK(ref.size() == 200);
  Vec2 mean = Vec2::Zero();
  double vx = 0.0, vy = 0.0;
  for (const auto& q : ref.points) {
    mean += q;
    vx += q.x() * q.x();
    vy += q.y() * q.y();
  }
  CHECK(mean.norm() / 200.0 < 1e-8);
  CHECK(vx > 3.0 * vy);
  CHECK(ellipse_category_id(2.2) == "ellipse_r2.2");
  CHECK_THROWS_AS(ellipse_reference(0.0, 5.0, 10.0), std::invalid_argument);
}
