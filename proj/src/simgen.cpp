#include "aggorient/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "aggorient/error.hpp"
#include "aggorient/parallel.hpp"

namespace aggorient {
namespace {

constexpr int kMaxAttempts = 100;

using Pixel = std::pair<long, long>;

long round_half_up(double v) { return static_cast<long>(std::floor(v + 0.5)); }

std::vector<Pixel> round_points(const PointSet& ps) {
  std::vector<Pixel> out;
  out.reserve(ps.size());
  for (const auto& p : ps.points) out.emplace_back(round_half_up(p.x()), round_half_up(p.y()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Primary {
  PointSet points;
  RigidTransform t;
  double a = 0.0;  // semi-axes in pixels
  double b = 0.0;
};

// Pixels p whose image T(p) falls inside the noisy ellipse
// q1^2/a^2 + q2^2/b^2 <= 1 + eps(direction of q).
Primary draw_primary(double nu_a, double nu_b, const SimParams& p, std::mt19937_64& rng,
                     std::vector<std::string>& warnings, const std::string& label) {
  std::normal_distribution<double> log_len(0.0, std::sqrt(p.sigma2));
  std::normal_distribution<double> noise(0.0, std::sqrt(p.sigma_e2));
  std::uniform_real_distribution<double> row(0.0, p.grid.height), col(0.0, p.grid.width);
  std::uniform_real_distribution<double> turn(0.0, kHalfPi);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Primary pr;
    pr.a = std::exp(nu_a + log_len(rng)) * p.pixels_per_unit;
    pr.b = std::exp(nu_b + log_len(rng)) * p.pixels_per_unit;
    std::vector<double> eps(p.noise_bins);
    for (auto& e : eps) e = noise(rng);
    const Vec2 c(row(rng), col(rng));
    pr.t = RigidTransform(c, turn(rng));

    const double grow = std::sqrt(1.0 + std::max(0.0, *std::max_element(eps.begin(), eps.end())));
    const double reach = std::max(pr.a, pr.b) * grow + 2.0;
    const double inv_a2 = 1.0 / (pr.a * pr.a), inv_b2 = 1.0 / (pr.b * pr.b);
    const auto bins = static_cast<double>(p.noise_bins);
    for (long i = static_cast<long>(std::floor(c.x() - reach)); i <= static_cast<long>(std::ceil(c.x() + reach)); ++i) {
      for (long j = static_cast<long>(std::floor(c.y() - reach)); j <= static_cast<long>(std::ceil(c.y() + reach)); ++j) {
        const Vec2 px(static_cast<double>(i), static_cast<double>(j));
        const Vec2 q = pr.t(px);
        const double dir = std::atan2(std::abs(q.y()), std::abs(q.x()));
        const auto bin = std::min(p.noise_bins - 1, static_cast<std::size_t>(dir / kHalfPi * bins));
        if (q.x() * q.x() * inv_a2 + q.y() * q.y() * inv_b2 <= 1.0 + eps[bin]) pr.points.points.push_back(px);
      }
    }
    try {
      require_shape(pr.points);
      return pr;
    } catch (const DegenerateError&) {
      warnings.push_back(label + ": degenerate raster, resampled");
    }
  }
  throw DegenerateError(label + ": could not draw a nondegenerate primary");
}

double polar_angle(const Vec2& v) { return std::atan2(v.y(), v.x()); }

std::size_t nearest_index(const PointSet& ps, const Vec2& target) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double d = (ps[i] - target).squaredNorm();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::size_t draw_contact(const Primary& pr, const SimParams& p, std::mt19937_64& rng) {
  if (p.contact == ContactMode::Uniform) {
    std::uniform_int_distribution<std::size_t> pick(0, pr.points.size() - 1);
    return pick(rng);
  }
  const double base = sample(p.contact_model, 1, rng).values.front();
  std::uniform_int_distribution<int> which(0, 3);
  const double candidates[4] = {base, -base, kPi - base, base - kPi};
  const double psi = candidates[which(rng)];
  const double c = std::cos(psi), s = std::sin(psi);
  const double radius = 1.0 / std::sqrt(c * c / (pr.a * pr.a) + s * s / (pr.b * pr.b));
  const Vec2 local = p.contact_radius * radius * Vec2(c, s);
  return nearest_index(pr.points, invert_rigid(pr.t)(local));
}

double mod_pi_difference(double a, double b) {
  const double d = a - b;
  return d - kPi * std::round(d / kPi);
}

}  // namespace

SimParams SimParams::with_ratios(double r_x, double r_y, double minor) {
  SimParams p;
  p.r_x = r_x;
  p.r_y = r_y;
  p.nu_b_x = p.nu_b_y = std::log(minor);
  p.nu_a_x = std::log(r_x * minor);
  p.nu_a_y = std::log(r_y * minor);
  return p;
}

void SimParams::validate() const {
  if (!(sigma2 > 0.0) || !(sigma_e2 > 0.0)) throw std::invalid_argument("sigma2 and sigma_e2 must be positive");
  if (!(r_x > 0.0) || !(r_y > 0.0)) throw std::invalid_argument("aspect ratios must be positive");
  if (grid.height <= 0 || grid.width <= 0) throw std::invalid_argument("grid must be nonempty");
  if (!(pixels_per_unit > 0.0)) throw std::invalid_argument("pixels_per_unit must be positive");
  if (noise_bins == 0) throw std::invalid_argument("noise_bins must be positive");
  if (n_cases == 0 || n_replicates == 0) throw std::invalid_argument("case and replicate counts must be positive");
  if (contact == ContactMode::Directed) {
    contact_model.validate();
    if (!(contact_radius >= 0.0 && contact_radius <= 1.0)) {
      throw std::invalid_argument("contact_radius must lie in [0, 1]");
    }
  }
}

SimCase simulate_case(const SimParams& p, std::mt19937_64& rng, std::string id) {
  p.validate();
  SimCase sc;
  sc.id = std::move(id);
  const Primary px = draw_primary(p.nu_a_x, p.nu_b_x, p, rng, sc.warnings, "x");
  const Primary py = draw_primary(p.nu_a_y, p.nu_b_y, p, rng, sc.warnings, "y");
  sc.x = px.points;
  sc.y = py.points;
  sc.x.source_id = sc.id + "/x";
  sc.y.source_id = sc.id + "/y";
  SimTruth& tr = sc.truth;
  tr.t_x = px.t;
  tr.t_y = py.t;
  tr.a_x = px.a / p.pixels_per_unit;
  tr.b_x = px.b / p.pixels_per_unit;
  tr.a_y = py.a / p.pixels_per_unit;
  tr.b_y = py.b / p.pixels_per_unit;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Vec2 cx = sc.x[draw_contact(px, p, rng)];
    const Vec2 cy = sc.y[draw_contact(py, p, rng)];
    // X's body lies on the -x side of the contact point and Y's on the +x side.
    const double ax = kPi - polar_angle(px.t.translation - cx);
    const double ay = -polar_angle(py.t.translation - cy);

    // Shift by an integer offset that centers the union's bounding box.
    const PointSet mx = apply_rigid(RigidTransform(cx, ax), sc.x);
    const PointSet my = apply_rigid(RigidTransform(cy, ay), sc.y);
    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (const PointSet* s : {&mx, &my}) {
      for (const auto& q : s->points) {
        for (int k = 0; k < 2; ++k) {
          lo[k] = std::min(lo[k], q[k]);
          hi[k] = std::max(hi[k], q[k]);
        }
      }
    }
    const double extent[2] = {static_cast<double>(p.grid.height), static_cast<double>(p.grid.width)};
    const Vec2 shift(std::round(0.5 * (extent[0] - hi[0] - lo[0])), std::round(0.5 * (extent[1] - hi[1] - lo[1])));
    tr.phi_x = RigidTransform(cx - rotation(ax).transpose() * shift, ax);
    tr.phi_y = RigidTransform(cy - rotation(ay).transpose() * shift, ay);
    tr.contact_x = cx;
    tr.contact_y = cy;

    const PointSet zx = apply_rigid(tr.phi_x, sc.x);
    const PointSet zy = apply_rigid(tr.phi_y, sc.y);
    try {
      sc.z = rasterize_union(zx, zy, p.grid);
    } catch (const OutOfBoundsError&) {
      sc.warnings.push_back("aggregate leaves the grid, contact resampled");
      continue;
    }
    const auto rx = round_points(zx), ry = round_points(zy);
    std::vector<Pixel> both;
    std::set_intersection(rx.begin(), rx.end(), ry.begin(), ry.end(), std::back_inserter(both));
    if (both.empty()) {
      sc.warnings.push_back("primaries do not overlap, contact resampled");
      continue;
    }
    Vec2 sum = Vec2::Zero();
    for (const auto& [i, j] : both) sum += Vec2(static_cast<double>(i), static_cast<double>(j));
    tr.center = sum / static_cast<double>(both.size());
    tr.overlap = both.size();
    try {
      tr.theta_x = orientation_angle(tr.t_x, tr.phi_x, tr.center);
      tr.theta_y = orientation_angle(tr.t_y, tr.phi_y, tr.center);
    } catch (const UndefinedOrientationError&) {
      sc.warnings.push_back("overlap centered on a primary center, contact resampled");
      continue;
    }
    sc.z.source_id = sc.id + "/z";
    return sc;
  }
  throw Error(sc.id + ": no valid contact configuration after " + std::to_string(kMaxAttempts) + " attempts");
}

std::vector<SimCase> simulate_batch(const SimParams& p) {
  p.validate();
  const std::size_t total = p.n_cases * p.n_replicates;
  std::vector<SimCase> cases(total);
  parallel_for(total, [&](std::size_t u) {
    auto rng = derived_rng(p.seed, u);
    const std::size_t rep = u / p.n_cases, idx = u % p.n_cases;
    std::ostringstream id;
    id << "r" << rep << "_c" << idx;
    cases[u] = simulate_case(p, rng, id.str());
    cases[u].replicate = rep;
    cases[u].index = idx;
  });
  return cases;
}

PointSet ellipse_reference(double a_units, double b_units, double pixels_per_unit, std::size_t max_points) {
  const double a = a_units * pixels_per_unit, b = b_units * pixels_per_unit;
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse_reference: axes must be positive");
  PointSet ps;
  const long ra = static_cast<long>(std::ceil(a)), rb = static_cast<long>(std::ceil(b));
  for (long i = -ra; i <= ra; ++i) {
    for (long j = -rb; j <= rb; ++j) {
      const double u = i / a, v = j / b;
      if (u * u + v * v <= 1.0) ps.points.emplace_back(static_cast<double>(i), static_cast<double>(j));
    }
  }
  PointSet ref = mds_embed(distance_matrix(subsample(ps, max_points)));
  ref.source_id = "ellipse_reference";
  return ref;
}

std::string ellipse_category_id(double r) {
  std::ostringstream os;
  os << "ellipse_r" << r;
  return os.str();
}

EstimateErrors evaluate_estimates(const SimTruth& truth, const AggregationRecord& est, double pixels_per_unit) {
  const double scale2 = pixels_per_unit * pixels_per_unit;
  auto angle_error = [](double d) { return 1.0 - std::cos(d); };
  EstimateErrors e;

  auto frame = [&](const RigidTransform& t, const RigidTransform& t_true, double& c_err, double& a_err) {
    c_err = (t.translation - t_true.translation).squaredNorm() / scale2;
    a_err = angle_error(mod_pi_difference(t.angle, t_true.angle));
  };
  frame(est.t_x, truth.t_x, e.t_x_translation, e.t_x_angle);
  frame(est.t_y, truth.t_y, e.t_y_translation, e.t_y_angle);

  // phi o (x -> 2m - x) has angle + pi and translation 2m - c.
  auto placement = [&](const RigidTransform& t, const RigidTransform& t_true, const Vec2& m, double& c_err,
                       double& a_err) {
    const double d = t.angle - t_true.angle;
    const bool flipped = std::cos(d) < 0.0;
    const Vec2 c = flipped ? Vec2(2.0 * m - t.translation) : t.translation;
    c_err = (c - t_true.translation).squaredNorm() / scale2;
    a_err = angle_error(mod_pi_difference(t.angle, t_true.angle));
  };
  placement(est.phi_x, truth.phi_x, truth.t_x.translation, e.phi_x_translation, e.phi_x_angle);
  placement(est.phi_y, truth.phi_y, truth.t_y.translation, e.phi_y_translation, e.phi_y_angle);

  e.theta_x = angle_error(normalize_angle(wrap_pi(est.theta_x)) - normalize_angle(wrap_pi(truth.theta_x)));
  e.theta_y = angle_error(normalize_angle(wrap_pi(est.theta_y)) - normalize_angle(wrap_pi(truth.theta_y)));
  return e;
}

}  // namespace aggorient
