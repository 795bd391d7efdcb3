#include "aggorient/correspondence.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "aggorient/error.hpp"
#include "aggorient/point_index.hpp"

namespace aggorient {
namespace {

constexpr std::size_t kPatience = 10;

std::vector<std::vector<std::size_t>> row_sets(const Correspondence& mu, std::size_t n_source) {
  std::vector<std::vector<std::size_t>> rows(n_source);
  for (const auto& [i, j] : mu.pairs) {
    if (i >= n_source) throw InvalidCorrespondenceError("correspondence source index out of range");
    rows[i].push_back(j);
  }
  return rows;
}

void check_indices(const Correspondence& mu, std::size_t n_source, std::size_t n_target) {
  for (const auto& [i, j] : mu.pairs) {
    if (i >= n_source || j >= n_target) {
      throw InvalidCorrespondenceError("correspondence index out of range");
    }
  }
}

/// Angle of the major principal axis, in (-pi/2, pi/2].
double principal_angle(const PointSet& ps) {
  const Vec2 c = centroid(ps);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : ps.points) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Vec2 major = eig.eigenvectors().col(1);
  return std::atan2(major.y(), major.x());
}

/// Rigid start mapping the centroid of `from` onto the centroid of `onto`
/// with rotation `angle`.
RigidTransform centroid_start(const PointSet& from, const PointSet& onto, double angle) {
  const Vec2 c = centroid(from) - rotation(angle).transpose() * centroid(onto);
  return RigidTransform(c, angle);
}

std::size_t nearest(const Vec2& q, const PointSet& ps) {
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double d = (ps[i] - q).squaredNorm();
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

/// Each source to its nearest target; uncovered targets to their nearest source.
Correspondence assign_one(const PointSet& moved, const PointSet& target) {
  Correspondence mu;
  std::vector<bool> hit(target.size(), false);
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const std::size_t j = nearest(moved[i], target);
    mu.pairs.emplace_back(i, j);
    hit[j] = true;
  }
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (!hit[j]) mu.pairs.emplace_back(nearest(target[j], moved), j);
  }
  std::sort(mu.pairs.begin(), mu.pairs.end());
  return mu;
}

void check_budget(const PointSet& ps, const MatchOptions& opts, const char* name) {
  if (ps.size() > opts.max_points) {
    throw std::invalid_argument(std::string(name) + " has " + std::to_string(ps.size()) +
                                " points, above the budget of " +
                                std::to_string(opts.max_points) + "; subsample first");
  }
}

MatchResult icp_one(const PointSet& ps, const PointSet& ref, const DistanceMatrix& dx,
                    const DistanceMatrix& d0, RigidTransform t, const MatchOptions& opts) {
  MatchResult best;
  best.residual = std::numeric_limits<double>::infinity();
  Correspondence prev;
  std::size_t stall = 0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    best.iterations = it;
    const Correspondence mu = assign_one(apply_rigid(t, ps), ref);
    const double obj = matrix_discrepancy(dx, d0, mu);
    if (obj < best.residual - opts.tolerance) {
      best.residual = obj;
      best.correspondence = mu;
      stall = 0;
    } else if (obj < best.residual) {
      best.residual = obj;
      best.correspondence = mu;
      ++stall;
    } else {
      ++stall;
    }
    best.trace.push_back(best.residual);
    if (mu == prev || stall >= kPatience) {
      best.converged = true;
      break;
    }
    prev = mu;
    t = estimate_rigid(ps, ref, mu);
  }
  best.transform = estimate_rigid(ps, ref, best.correspondence);
  return best;
}

/// Two-body assignment: each x and y point to its nearest z; uncovered z to
/// the nearest moved point of either body, x winning ties.
PairCorrespondence assign_two(const PointSet& mx, const PointSet& my, const PointSet& z,
                              const PointIndex& zi) {
  PairCorrespondence pc;
  std::vector<bool> hit(z.size(), false);
  pc.mu_x.pairs.reserve(mx.size());
  pc.mu_y.pairs.reserve(my.size());
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const std::size_t k = zi.nearest(mx[i]);
    pc.mu_x.pairs.emplace_back(i, k);
    hit[k] = true;
  }
  for (std::size_t j = 0; j < my.size(); ++j) {
    const std::size_t k = zi.nearest(my[j]);
    pc.mu_y.pairs.emplace_back(j, k);
    hit[k] = true;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
    // x points come first, so the lowest-index tie rule lets x win ties
    PointSet both;
    both.points.reserve(mx.size() + my.size());
    both.points.insert(both.points.end(), mx.points.begin(), mx.points.end());
    both.points.insert(both.points.end(), my.points.begin(), my.points.end());
    const PointIndex bi(both);
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (hit[k]) continue;
      const std::size_t n = bi.nearest(z[k]);
      if (n < mx.size()) {
        pc.mu_x.pairs.emplace_back(n, k);
      } else {
        pc.mu_y.pairs.emplace_back(n - mx.size(), k);
      }
    }
  }
  std::sort(pc.mu_x.pairs.begin(), pc.mu_x.pairs.end());
  std::sort(pc.mu_y.pairs.begin(), pc.mu_y.pairs.end());
  return pc;
}

/// Summed squared pair distances of both blocks under (tx, ty).
double pair_fit_cost(const PointSet& mx, const PointSet& my, const PointSet& z, const PairCorrespondence& pc) {
  double s = 0.0;
  for (const auto& [i, k] : pc.mu_x.pairs) s += (mx[i] - z[k]).squaredNorm();
  for (const auto& [j, k] : pc.mu_y.pairs) s += (my[j] - z[k]).squaredNorm();
  return s;
}

/// Alternates nearest-neighbour assignment and the closed-form pair transform.
/// The incumbent is the iterate with the smallest coordinate-space cost; its
/// d_D is reported as the residual.
PairMatchResult icp_two(const PointSet& x, const PointSet& y, const PointSet& z, const PointIndex& zi,
                        RigidTransform tx, RigidTransform ty, const MatchOptions& opts, double& best_cost) {
  PairMatchResult best;
  best_cost = std::numeric_limits<double>::infinity();
  PairCorrespondence prev;
  std::size_t stall = 0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    best.iterations = it;
    const PointSet mx = apply_rigid(tx, x), my = apply_rigid(ty, y);
    const PairCorrespondence pc = assign_two(mx, my, z, zi);
    const double cost = pair_fit_cost(mx, my, z, pc);
    if (cost < best_cost) {
      stall = cost < best_cost * (1.0 - opts.tolerance) ? 0 : stall + 1;
      best_cost = cost;
      best.correspondence = pc;
    } else {
      ++stall;
    }
    best.trace.push_back(best_cost);
    if (pc == prev || stall >= kPatience) {
      best.converged = true;
      break;
    }
    prev = pc;
    std::tie(tx, ty) = estimate_pair_rigid(x, y, z, pc);
  }
  std::tie(best.phi_x, best.phi_y) = estimate_pair_rigid(x, y, z, best.correspondence);
  return best;
}

/// Halves of z on either side of the line through its centroid along the minor axis.
std::pair<PointSet, PointSet> split_by_minor_axis(const PointSet& z) {
  const Vec2 c = centroid(z);
  const double a = principal_angle(z);
  const Vec2 major(std::cos(a), std::sin(a));
  PointSet lo, hi;
  for (const auto& p : z.points) ((p - c).dot(major) >= 0.0 ? hi : lo).points.push_back(p);
  return {std::move(hi), std::move(lo)};
}


/// Pose of one body as (angle, image of the body centroid); unlike the
/// stored translation this decouples rotation from displacement.
struct Pose {
  double angle = 0.0;
  Vec2 image = Vec2::Zero();
};

Pose to_pose(const RigidTransform& t, const Vec2& m) { return {t.angle, t(m)}; }

RigidTransform from_pose(const Pose& p, const Vec2& m) {
  return RigidTransform(m - rotation(p.angle).transpose() * p.image, p.angle);
}

struct DenseState {
  RigidTransform tx, ty;
  PairCorrespondence pc;
  double cost = 0.0;
};

DenseState evaluate_dense(const PointSet& x, const PointSet& y, const PointSet& z, const PointIndex& zi,
                          const RigidTransform& tx, const RigidTransform& ty) {
  DenseState s;
  s.tx = tx;
  s.ty = ty;
  const PointSet mx = apply_rigid(tx, x), my = apply_rigid(ty, y);
  s.pc = assign_two(mx, my, z, zi);
  s.cost = pair_fit_cost(mx, my, z, s.pc);
  return s;
}

/// icp_two on the full sets, started from a coarse solution. Interior points
/// of filled shapes sit at near-zero residual and shrink each plain update,
/// so every update direction is extrapolated with doubling steps while the
/// cost keeps falling.
PairMatchResult icp_two_dense(const PointSet& x, const PointSet& y, const PointSet& z, const PointIndex& zi,
                              RigidTransform tx, RigidTransform ty, const MatchOptions& opts,
                              double& best_cost) {
  constexpr int kMaxDoublings = 8;
  const Vec2 cx = centroid(x), cy = centroid(y);
  PairMatchResult res;
  DenseState cur = evaluate_dense(x, y, z, zi, tx, ty);
  DenseState incumbent = cur;
  res.trace.push_back(cur.cost);
  std::size_t stall = 0;
  std::size_t it = 1;
  for (; it <= opts.max_iterations; ++it) {
    const auto [nx, ny] = estimate_pair_rigid(x, y, z, cur.pc);
    const Pose px = to_pose(cur.tx, cx), py = to_pose(cur.ty, cy);
    const Pose qx = to_pose(nx, cx), qy = to_pose(ny, cy);
    const double dax = wrap_pi(qx.angle - px.angle), day = wrap_pi(qy.angle - py.angle);
    const Vec2 dux = qx.image - px.image, duy = qy.image - py.image;
    const double step = std::max({std::abs(dax), std::abs(day)}) * 1e3 + std::max(dux.norm(), duy.norm());
    if (step < 1e-6) {
      res.converged = true;
      break;
    }
    DenseState next = evaluate_dense(x, y, z, zi, nx, ny);
    double alpha = 2.0;
    for (int k = 0; k < kMaxDoublings; ++k, alpha *= 2.0) {
      const RigidTransform ex = from_pose({px.angle + alpha * dax, px.image + alpha * dux}, cx);
      const RigidTransform ey = from_pose({py.angle + alpha * day, py.image + alpha * duy}, cy);
      DenseState trial = evaluate_dense(x, y, z, zi, ex, ey);
      if (!(trial.cost < next.cost)) break;
      next = std::move(trial);
    }
    // the coverage repair makes single updates non-monotone, so a step that
    // does not improve is still taken and the best state is kept
    if (next.cost < incumbent.cost * (1.0 - opts.tolerance)) {
      stall = 0;
    } else {
      ++stall;
    }
    if (next.cost < incumbent.cost) incumbent = next;
    const bool fixed = next.pc == cur.pc;
    cur = std::move(next);
    res.trace.push_back(incumbent.cost);
    if (fixed || stall >= kPatience) {
      res.converged = true;
      break;
    }
  }
  cur = std::move(incumbent);
  res.iterations = std::min(it, opts.max_iterations);
  res.correspondence = std::move(cur.pc);
  std::tie(res.phi_x, res.phi_y) = estimate_pair_rigid(x, y, z, res.correspondence);
  best_cost = cur.cost;
  return res;
}

/// Pattern search over both poses on the full-resolution cost. Dense ICP
/// stalls a pixel or two from the optimum when the misfit is a thin boundary
/// strip, because interior pairs carry no positional signal.
DenseState polish_poses(const PointSet& x, const PointSet& y, const PointSet& z, const PointIndex& zi,
                        DenseState cur) {
  const Vec2 cx = centroid(x), cy = centroid(y);
  auto radius = [](const PointSet& ps, const Vec2& c) {
    double s = 0.0;
    for (const auto& p : ps.points) s += (p - c).squaredNorm();
    return std::max(1.0, std::sqrt(s / static_cast<double>(ps.size())));
  };
  const double rx = radius(x, cx), ry = radius(y, cy);
  // translations of X alone, Y alone, both together and both apart, along
  // the axes and diagonals; then a turn of either body
  const std::array<Vec2, 4> dirs{Vec2(1, 0), Vec2(0, 1), Vec2(1, 1) / std::sqrt(2.0), Vec2(1, -1) / std::sqrt(2.0)};
  const std::array<std::pair<double, double>, 4> bodies{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  for (double h = 2.0; h >= 0.125; h *= 0.5) {
    bool improved = true;
    for (int pass = 0; improved && pass < 20; ++pass) {
      improved = false;
      auto attempt = [&](const Pose& px, const Pose& py) {
        DenseState trial = evaluate_dense(x, y, z, zi, from_pose(px, cx), from_pose(py, cy));
        if (trial.cost < cur.cost) {
          cur = std::move(trial);
          improved = true;
        }
      };
      for (const auto& [wx, wy] : bodies) {
        for (const Vec2& d : dirs) {
          for (double sign : {1.0, -1.0}) {
            Pose px = to_pose(cur.tx, cx), py = to_pose(cur.ty, cy);
            px.image += sign * h * wx * d;
            py.image += sign * h * wy * d;
            attempt(px, py);
          }
        }
      }
      for (int body = 0; body < 2; ++body) {
        for (double sign : {1.0, -1.0}) {
          Pose px = to_pose(cur.tx, cx), py = to_pose(cur.ty, cy);
          if (body == 0) px.angle += sign * h / rx;
          else py.angle += sign * h / ry;
          attempt(px, py);
        }
      }
    }
  }
  return cur;
}

struct Candidate {
  PairMatchResult fit;
  double cost = 0.0;
};

/// Placements in one basin: body centroid images within 6 px and angles
/// within 0.25 rad modulo a half-turn. Coarse solutions of a near-symmetric
/// body differ mostly by such turns, which would otherwise fill the shortlist.
bool same_basin(const RigidTransform& a, const RigidTransform& b, const Vec2& m) {
  const double d = std::abs(wrap_pi(a.angle - b.angle));
  return std::min(d, kPi - d) < 0.25 && (a(m) - b(m)).norm() < 6.0;
}

}  // namespace

bool covers(const Correspondence& mu, std::size_t n_source, std::size_t n_target) {
  std::vector<bool> rows(n_source, false), cols(n_target, false);
  for (const auto& [i, j] : mu.pairs) {
    if (i >= n_source || j >= n_target) return false;
    rows[i] = true;
    cols[j] = true;
  }
  return std::all_of(rows.begin(), rows.end(), [](bool b) { return b; }) &&
         std::all_of(cols.begin(), cols.end(), [](bool b) { return b; });
}

bool covers(const PairCorrespondence& pc, std::size_t n_x, std::size_t n_y, std::size_t n_z) {
  std::vector<bool> rx(n_x, false), ry(n_y, false), cz(n_z, false);
  for (const auto& [i, k] : pc.mu_x.pairs) {
    if (i >= n_x || k >= n_z) return false;
    rx[i] = true;
    cz[k] = true;
  }
  for (const auto& [j, k] : pc.mu_y.pairs) {
    if (j >= n_y || k >= n_z) return false;
    ry[j] = true;
    cz[k] = true;
  }
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(rx) && all(ry) && all(cz);
}

double set_distance(const PointSet& ps, const PointSet& target, const Correspondence& mu,
                    const RigidTransform& t) {
  if (mu.empty()) throw InvalidCorrespondenceError("set_distance: empty correspondence");
  check_indices(mu, ps.size(), target.size());
  double sum = 0.0;
  for (const auto& [i, j] : mu.pairs) sum += (t(ps[i]) - target[j]).squaredNorm();
  return std::sqrt(sum);
}

double matrix_discrepancy(const DistanceMatrix& d_source, const DistanceMatrix& d_target,
                          const Correspondence& mu) {
  const auto m = static_cast<std::size_t>(d_source.rows());
  check_indices(mu, m, static_cast<std::size_t>(d_target.rows()));
  const auto rows = row_sets(mu, m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i; k < m; ++k) {
      double pulled = 0.0;
      for (auto j : rows[i])
        for (auto l : rows[k]) pulled += d_target(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
      const double e = d_source(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) - pulled;
      sum += (i == k ? 1.0 : 2.0) * e * e;
    }
  }
  return std::sqrt(sum);
}

RigidTransform estimate_rigid(const PointSet& ps, const PointSet& target, const Correspondence& mu) {
  if (mu.empty()) throw InvalidCorrespondenceError("estimate_rigid: empty correspondence");
  check_indices(mu, ps.size(), target.size());
  Vec2 ms = Vec2::Zero(), mt = Vec2::Zero();
  for (const auto& [i, j] : mu.pairs) {
    ms += ps[i];
    mt += target[j];
  }
  const double n = static_cast<double>(mu.pairs.size());
  ms /= n;
  mt /= n;
  double cross = 0.0, dot = 0.0, spread_s = 0.0, spread_t = 0.0;
  for (const auto& [i, j] : mu.pairs) {
    const Vec2 p = ps[i] - ms;
    const Vec2 q = target[j] - mt;
    cross += p.x() * q.y() - p.y() * q.x();
    dot += p.dot(q);
    spread_s += p.squaredNorm();
    spread_t += q.squaredNorm();
  }
  const double scale = std::max(spread_s, spread_t);
  if (spread_s <= 1e-24 * (1.0 + ms.squaredNorm()) || spread_t <= 1e-24 * (1.0 + mt.squaredNorm()) ||
      std::hypot(cross, dot) <= 1e-14 * scale) {
    throw DegenerateError("estimate_rigid: correspondences are coincident");
  }
  const double theta = std::atan2(cross, dot);
  return RigidTransform(ms - rotation(theta).transpose() * mt, theta);
}

std::pair<RigidTransform, RigidTransform> estimate_pair_rigid(const PointSet& x, const PointSet& y,
                                                              const PointSet& z,
                                                              const PairCorrespondence& pc) {
  return {estimate_rigid(x, z, pc.mu_x), estimate_rigid(y, z, pc.mu_y)};
}

Correspondence exact_correspondence(const DistanceMatrix& d_source, const DistanceMatrix& d_target,
                                    const Correspondence* incumbent) {
  const auto m = static_cast<std::size_t>(d_source.rows());
  const auto m0 = static_cast<std::size_t>(d_target.rows());
  if (m == 0 || m0 == 0) throw std::invalid_argument("exact_correspondence: empty set");
  if (m0 > 10) throw std::invalid_argument("exact_correspondence: target too large for enumeration");

  const std::size_t nm = std::size_t{1} << m0;
  const std::uint32_t full = static_cast<std::uint32_t>(nm - 1);

  // rowsum[j][b] = sum_{l in b} D0(j, l); pairsum[a][b] = sum_{j in a, l in b} D0(j, l)
  std::vector<double> rowsum(m0 * nm, 0.0);
  for (std::size_t j = 0; j < m0; ++j)
    for (std::size_t b = 1; b < nm; ++b) {
      const auto low = static_cast<std::size_t>(std::countr_zero(b));
      rowsum[j * nm + b] = rowsum[j * nm + (b & (b - 1))] +
                           d_target(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(low));
    }
  std::vector<double> pairsum(nm * nm, 0.0);
  for (std::size_t a = 1; a < nm; ++a) {
    const auto low = static_cast<std::size_t>(std::countr_zero(a));
    for (std::size_t b = 0; b < nm; ++b)
      pairsum[a * nm + b] = pairsum[(a & (a - 1)) * nm + b] + rowsum[low * nm + b];
  }

  std::vector<std::uint32_t> masks(m, 0), best_masks;
  double best = std::numeric_limits<double>::infinity();
  if (incumbent != nullptr && covers(*incumbent, m, m0)) {
    std::vector<std::uint32_t> inc(m, 0);
    for (const auto& [i, j] : incumbent->pairs) inc[i] |= std::uint32_t{1} << j;
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        const double e = d_source(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) -
                         pairsum[inc[i] * nm + inc[k]];
        cost += e * e;
      }
    best = cost;
    best_masks = inc;
  }

  struct Option {
    double cost;
    std::uint32_t mask;
  };
  std::vector<std::vector<Option>> scratch(m);
  for (auto& s : scratch) s.reserve(nm);

  // depth-first over rows; partial cost only counts entries between assigned rows
  auto dfs = [&](auto&& self, std::size_t i, std::uint32_t covered, double partial) -> void {
    if (i == m) {
      if (covered == full && partial < best) {
        best = partial;
        best_masks = masks;
      }
      return;
    }
    auto& opts = scratch[i];
    opts.clear();
    for (std::uint32_t s = 1; s <= full; ++s) {
      if (i + 1 == m && (covered | s) != full) continue;
      const double ed = d_source(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -
                        pairsum[s * nm + s];
      double add = ed * ed;
      for (std::size_t k = 0; k < i && partial + add < best; ++k) {
        const double e = d_source(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) -
                         pairsum[s * nm + masks[k]];
        add += 2.0 * e * e;
      }
      if (partial + add < best) opts.push_back({partial + add, s});
    }
    std::sort(opts.begin(), opts.end(), [](const Option& l, const Option& r) {
      return l.cost < r.cost || (l.cost == r.cost && l.mask < r.mask);
    });
    for (const auto& o : opts) {
      if (o.cost >= best) break;
      masks[i] = o.mask;
      self(self, i + 1, covered | o.mask, o.cost);
    }
  };
  dfs(dfs, 0, 0, 0.0);

  Correspondence out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m0; ++j)
      if (best_masks[i] & (std::uint32_t{1} << j)) out.pairs.emplace_back(i, j);
  return out;
}

MatchResult match_one_to_one(const PointSet& ps, const PointSet& reference, const MatchOptions& opts) {
  require_shape(ps);
  require_shape(reference);
  check_budget(ps, opts, "source");
  check_budget(reference, opts, "reference");

  const DistanceMatrix dx = distance_matrix(ps);
  const DistanceMatrix d0 = distance_matrix(reference);

  // principal-axis alignment plus the three other quarter turns; a reflection
  // is not reachable by a proper rigid transform
  const double base = principal_angle(reference) - principal_angle(ps);
  MatchResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    MatchResult r = icp_one(ps, reference, dx, d0, centroid_start(ps, reference, base + k * kHalfPi), opts);
    if (r.residual < best.residual) best = std::move(r);
  }

  if (ps.size() <= opts.exact_limit && reference.size() <= opts.exact_limit) {
    Correspondence exact = exact_correspondence(dx, d0, &best.correspondence);
    const double r = matrix_discrepancy(dx, d0, exact);
    if (r < best.residual) {
      best.correspondence = std::move(exact);
      best.residual = r;
      best.transform = estimate_rigid(ps, reference, best.correspondence);
    }
    best.trace.push_back(best.residual);
    best.converged = true;
  }

  if (!covers(best.correspondence, ps.size(), reference.size())) {
    throw InvalidCorrespondenceError("match_one_to_one: coverage invariant violated");
  }
  return best;
}

PairMatchResult match_two_to_one(const PointSet& x, const PointSet& y, const PointSet& z,
                                 const MatchOptions& opts) {
  require_shape(x);
  require_shape(y);
  require_shape(z);
  const PointSet sx = subsample(x, opts.max_points);
  const PointSet sy = subsample(y, opts.max_points);
  const PointSet sz = subsample(z, opts.max_points);
  const bool dense = sx.size() < x.size() || sy.size() < y.size() || sz.size() < z.size();

  auto [hi, lo] = split_by_minor_axis(sz);
  if (hi.size() < 3 || lo.size() < 3) hi = lo = sz;
  // the larger primary seeds into the larger half first; both assignments are tried
  const bool x_larger = x.size() >= y.size();
  const bool hi_larger = hi.size() >= lo.size();
  const PointSet& first_x = (x_larger == hi_larger) ? hi : lo;
  const PointSet& first_y = (x_larger == hi_larger) ? lo : hi;
  const std::array<std::pair<const PointSet*, const PointSet*>, 2> layouts{
      std::make_pair(&first_x, &first_y), std::make_pair(&first_y, &first_x)};

  const PointIndex szi(sz);
  std::vector<Candidate> found;
  for (const auto& [hx, hy] : layouts) {
    const double bx = principal_angle(*hx) - principal_angle(sx);
    const double by = principal_angle(*hy) - principal_angle(sy);
    const int turns = static_cast<int>(std::max<std::size_t>(1, opts.pair_start_angles));
    const double step = kTwoPi / turns;
    for (int kx = 0; kx < turns; ++kx) {
      for (int ky = 0; ky < turns; ++ky) {
        Candidate c;
        c.fit = icp_two(sx, sy, sz, szi, centroid_start(sx, *hx, bx + kx * step),
                        centroid_start(sy, *hy, by + ky * step), opts, c.cost);
        found.push_back(std::move(c));
      }
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  std::vector<Candidate> shortlist;
  const std::size_t keep = std::max<std::size_t>(1, opts.refine_candidates);
  const Vec2 mx = centroid(sx), my = centroid(sy);
  for (auto& c : found) {
    if (shortlist.size() >= keep) break;
    const bool repeat = std::any_of(shortlist.begin(), shortlist.end(), [&](const Candidate& o) {
      return same_basin(o.fit.phi_x, c.fit.phi_x, mx) && same_basin(o.fit.phi_y, c.fit.phi_y, my);
    });
    if (!repeat) shortlist.push_back(std::move(c));
  }

  PairMatchResult best;
  if (dense) {
    const PointIndex zi(z);
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& c : shortlist) {
      double cost = 0.0;
      PairMatchResult r = icp_two_dense(x, y, z, zi, c.fit.phi_x, c.fit.phi_y, opts, cost);
      if (cost < best_cost) {
        best_cost = cost;
        best = std::move(r);
      }
    }
    DenseState start = evaluate_dense(x, y, z, zi, best.phi_x, best.phi_y);
    // the shortlist keeps one turn per basin; try the half-turns of each body
    const Vec2 cx = centroid(x), cy = centroid(y);
    for (int flip = 1; flip < 4; ++flip) {
      Pose px = to_pose(best.phi_x, cx), py = to_pose(best.phi_y, cy);
      if (flip & 1) px.angle += kPi;
      if (flip & 2) py.angle += kPi;
      DenseState alt = evaluate_dense(x, y, z, zi, from_pose(px, cx), from_pose(py, cy));
      if (alt.cost < start.cost) start = std::move(alt);
    }
    DenseState polished = polish_poses(x, y, z, zi, start);
    if (polished.cost < start.cost) {
      // the closed form on the polished correspondence, unless the pose itself fits better
      const auto [fx, fy] = estimate_pair_rigid(x, y, z, polished.pc);
      DenseState refit = evaluate_dense(x, y, z, zi, fx, fy);
      start = refit.cost <= polished.cost ? std::move(refit) : std::move(polished);
    }
    best.phi_x = start.tx;
    best.phi_y = start.ty;
    best.correspondence = start.pc;
  } else {
    best = std::move(shortlist.front().fit);
  }

  // d_D is quadratic in the set sizes, so it is evaluated on the subsamples
  // under the final transforms.
  const PairCorrespondence sub = assign_two(apply_rigid(best.phi_x, sx), apply_rigid(best.phi_y, sy), sz, szi);
  const DistanceMatrix dz = distance_matrix(sz);
  best.residual = matrix_discrepancy(distance_matrix(sx), dz, sub.mu_x) +
                  matrix_discrepancy(distance_matrix(sy), dz, sub.mu_y);

  if (!covers(best.correspondence, x.size(), y.size(), z.size())) {
    throw InvalidCorrespondenceError("match_two_to_one: coverage invariant violated");
  }
  return best;
}

}  // namespace aggorient
