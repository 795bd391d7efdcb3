#include "aggorient/dirstats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "aggorient/bessel.hpp"
#include "aggorient/error.hpp"
#include "aggorient/parallel.hpp"

namespace aggorient {
namespace {

constexpr double kPiD = 3.14159265358979323846;
constexpr double kHalfPiD = 0.5 * kPiD;
constexpr double kLogTwoOverPi = -0.45158270528945486;  // log(2/pi)
constexpr double kUniformKappa = 0.5;
constexpr int kMaxNewtonIterations = 100;
constexpr double kGradientTarget = 1e-8;
constexpr double kGradientAccept = 1e-6;

constexpr std::size_t kCdfPanels = 128;
constexpr int kGaussOrder = 10;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};
  std::array<double, kGaussOrder> weights{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPiD * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace

void FourFoldVonMises::validate() const {
  if (!(gamma >= 0.0 && gamma <= kHalfPiD)) throw std::invalid_argument("gamma must lie in [0, pi/2]");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be nonnegative");
}

void AngleSample::validate() const {
  for (double v : values) {
    if (!(v >= 0.0 && v <= kHalfPiD)) throw std::invalid_argument("sample angle outside [0, pi/2]");
  }
}

FourFoldVonMises ParameterBox::project(const FourFoldVonMises& p) const {
  return {std::clamp(p.gamma, gamma_lo, gamma_hi), std::clamp(p.kappa, kappa_lo, kappa_hi)};
}

double logcosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_density(double theta, const FourFoldVonMises& p) {
  const double u = p.kappa * std::cos(p.gamma) * std::cos(theta);
  const double v = p.kappa * std::sin(p.gamma) * std::sin(theta);
  return kLogTwoOverPi + logcosh(u) + logcosh(v) - bessel::log_i0(p.kappa);
}

double density(double theta, const FourFoldVonMises& p) { return std::exp(log_density(theta, p)); }

double log_likelihood(std::span<const double> values, const FourFoldVonMises& p) {
  const double cg = p.kappa * std::cos(p.gamma);
  const double sg = p.kappa * std::sin(p.gamma);
  double sum = 0.0;
  for (double t : values) sum += logcosh(cg * std::cos(t)) + logcosh(sg * std::sin(t));
  const double n = static_cast<double>(values.size());
  return sum + n * (kLogTwoOverPi - bessel::log_i0(p.kappa));
}

double log_likelihood(const AngleSample& s, const FourFoldVonMises& p) {
  return log_likelihood(std::span<const double>(s.values), p);
}

LikelihoodDerivatives likelihood_derivatives(std::span<const double> values,
                                             const FourFoldVonMises& p) {
  const double k = p.kappa;
  const double cg = std::cos(p.gamma), sg = std::sin(p.gamma);
  LikelihoodDerivatives d;
  double gg = 0.0, gk = 0.0, hgg = 0.0, hkk = 0.0, hgk = 0.0, val = 0.0;
  for (double t : values) {
    const double ct = std::cos(t), st = std::sin(t);
    const double u = k * cg * ct, v = k * sg * st;
    const double tu = std::tanh(u), tv = std::tanh(v);
    const double su = 1.0 - tu * tu, sv = 1.0 - tv * tv;
    const double u_g = -k * sg * ct, v_g = k * cg * st;
    const double u_k = cg * ct, v_k = sg * st;
    const double u_gk = -sg * ct, v_gk = cg * st;
    val += logcosh(u) + logcosh(v);
    gg += tu * u_g + tv * v_g;
    gk += tu * u_k + tv * v_k;
    hgg += su * u_g * u_g - tu * u + sv * v_g * v_g - tv * v;
    hkk += su * u_k * u_k + sv * v_k * v_k;
    hgk += su * u_g * u_k + tu * u_gk + sv * v_g * v_k + tv * v_gk;
  }
  const double n = static_cast<double>(values.size());
  d.value = val + n * (kLogTwoOverPi - bessel::log_i0(k));
  d.gradient << gg, gk - n * bessel::ratio_i1_i0(k);
  d.hessian << hgg, hgk, hgk, hkk - n * bessel::ratio_i1_i0_derivative(k);
  return d;
}

double invert_bessel_ratio(double target) {
  if (target <= 0.0) return 0.0;
  if (target >= bessel::ratio_i1_i0(kMaxKappa)) return kMaxKappa;
  double lo = 0.0, hi = kMaxKappa;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bessel::ratio_i1_i0(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

FourFoldVonMises initial_guesses(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("initial_guesses: empty sample");
  double c = 0.0, s = 0.0;
  for (double t : values) {
    c += std::cos(t);
    s += std::sin(t);
  }
  const double n = static_cast<double>(values.size());
  c /= n;
  s /= n;
  FourFoldVonMises g;
  g.gamma = std::clamp(std::atan2(s, c), 0.0, kHalfPiD);
  if (values.size() < 2) {
    g.kappa = 0.0;
    return g;
  }
  double target = n / (n - 1.0) * (c * c + s * s) - 1.0 / (n - 1.0);
  target = std::clamp(target, 0.0, 1.0 - 1e-9);
  g.kappa = invert_bessel_ratio(target);
  return g;
}

FourFoldVonMises initial_guesses(const AngleSample& s) {
  return initial_guesses(std::span<const double>(s.values));
}

namespace {

// Which coordinates may move: not pinned by a degenerate interval and not
// pressed against an active bound.
std::array<bool, 2> free_coordinates(const FourFoldVonMises& x, const Eigen::Vector2d& g,
                                     const ParameterBox& box) {
  const double lo[2] = {box.gamma_lo, box.kappa_lo};
  const double hi[2] = {box.gamma_hi, box.kappa_hi};
  const double at[2] = {x.gamma, x.kappa};
  std::array<bool, 2> free{};
  for (int i = 0; i < 2; ++i) {
    if (hi[i] <= lo[i]) continue;
    if (at[i] <= lo[i] && g[i] <= 0.0) continue;
    if (at[i] >= hi[i] && g[i] >= 0.0) continue;
    free[i] = true;
  }
  return free;
}

// Rounding level of log_likelihood, which cancels two sums of size ~ n * kappa.
double likelihood_noise(std::size_t n, double kappa) {
  return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) * (1.0 + kappa);
}

double projected_norm(const Eigen::Vector2d& g, const std::array<bool, 2>& free) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (free[i]) s += g[i] * g[i];
  }
  return std::sqrt(s);
}

// Ascent direction from the Hessian, with eigenvalues of -H forced positive.
Eigen::Vector2d newton_direction(const LikelihoodDerivatives& d, const std::array<bool, 2>& free) {
  Eigen::Vector2d step = Eigen::Vector2d::Zero();
  const Eigen::Matrix2d a = -d.hessian;
  if (free[0] && free[1]) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    Eigen::Vector2d ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (int i = 0; i < 2; ++i) ev[i] = std::max(std::abs(ev[i]), 1e-10 * scale);
    const Eigen::Matrix2d& q = es.eigenvectors();
    step = q * (q.transpose() * d.gradient).cwiseQuotient(ev);
  } else {
    for (int i = 0; i < 2; ++i) {
      if (!free[i]) continue;
      const double curv = std::abs(a(i, i));
      step[i] = curv > 1e-12 ? d.gradient[i] / curv : d.gradient[i];
    }
  }
  return step;
}

}  // namespace

StartTrace newton_maximize(std::span<const double> values, const FourFoldVonMises& start,
                           const ParameterBox& box) {
  StartTrace tr;
  tr.start = start;
  FourFoldVonMises x = box.project(start);
  LikelihoodDerivatives d = likelihood_derivatives(values, x);
  auto free = free_coordinates(x, d.gradient, box);
  double pg = projected_norm(d.gradient, free);
  std::size_t it = 0;
  for (; it < kMaxNewtonIterations && pg >= kGradientTarget; ++it) {
    bool moved = false;
    for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
      Eigen::Vector2d dir = attempt == 0 ? newton_direction(d, free) : d.gradient;
      for (int i = 0; i < 2; ++i) {
        if (!free[i]) dir[i] = 0.0;
      }
      if (attempt == 1) dir *= 1.0 / std::max(1.0, dir.norm());
      double t = 1.0;
      for (int h = 0; h < 50; ++h, t *= 0.5) {
        const FourFoldVonMises cand = box.project({x.gamma + t * dir[0], x.kappa + t * dir[1]});
        if (cand.gamma == x.gamma && cand.kappa == x.kappa) break;
        const double lv = log_likelihood(values, cand);
        bool accept = lv > d.value;
        if (!accept && std::abs(lv - d.value) <= likelihood_noise(values.size(), std::max(x.kappa, cand.kappa))) {
          // the likelihood no longer resolves the step, so judge it by the gradient
          const LikelihoodDerivatives dc = likelihood_derivatives(values, cand);
          accept = projected_norm(dc.gradient, free_coordinates(cand, dc.gradient, box)) < pg;
        }
        if (accept) {
          x = cand;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
    d = likelihood_derivatives(values, x);
    free = free_coordinates(x, d.gradient, box);
    pg = projected_norm(d.gradient, free);
  }
  tr.end = x;
  tr.log_likelihood = d.value;
  tr.gradient_norm = pg;
  tr.iterations = it;
  tr.converged = std::isfinite(d.value) && pg < kGradientAccept;
  return tr;
}

namespace {

std::vector<FourFoldVonMises> moment_starts(std::span<const double> values, const ParameterBox& box) {
  const FourFoldVonMises g = initial_guesses(values);
  std::vector<FourFoldVonMises> starts;
  for (double dg : {0.0, -0.1, 0.1}) {
    for (double dk : {0.0, -1.0, 1.0}) {
      const FourFoldVonMises s = box.project({g.gamma + dg, g.kappa + dk});
      const bool seen = std::any_of(starts.begin(), starts.end(), [&](const FourFoldVonMises& o) {
        return o.gamma == s.gamma && o.kappa == s.kappa;
      });
      if (!seen) starts.push_back(s);
    }
  }
  return starts;
}

}  // namespace

FitResult fit_in_box(std::span<const double> values, const ParameterBox& box,
                     const std::vector<FourFoldVonMises>& extra_starts) {
  if (values.empty()) throw std::invalid_argument("fit: empty sample");
  std::vector<FourFoldVonMises> starts = moment_starts(values, box);
  for (const auto& s : extra_starts) starts.push_back(box.project(s));

  FitResult res;
  bool any = false;
  for (const auto& s : starts) {
    StartTrace tr = newton_maximize(values, s, box);
    bool better = std::isfinite(tr.log_likelihood);
    if (better && any) {
      const double tol = likelihood_noise(values.size(), std::max(tr.end.kappa, res.params.kappa));
      if (std::abs(tr.log_likelihood - res.log_likelihood) <= tol) {
        // same optimum up to rounding
        better = tr.converged != res.converged ? tr.converged : tr.gradient_norm < res.gradient_norm;
      } else {
        better = tr.log_likelihood > res.log_likelihood;
      }
    }
    if (better) {
      any = true;
      res.params = tr.end;
      res.log_likelihood = tr.log_likelihood;
      res.gradient_norm = tr.gradient_norm;
      res.iterations = tr.iterations;
      res.converged = tr.converged;
    }
    res.starts.push_back(tr);
  }
  if (!any) throw FitFailure("fit: no start produced a finite likelihood");
  return res;
}

bool likelihood_is_flat(std::span<const double> values) {
  constexpr int kGrid = 33;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < kGrid; ++i) {
    ParameterBox fixed;
    fixed.gamma_lo = fixed.gamma_hi = kHalfPiD * i / (kGrid - 1);
    const double l = fit_in_box(values, fixed, {{fixed.gamma_lo, 0.0}}).log_likelihood;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return hi - lo < 1.92;
}

FitResult mle_fit(const AngleSample& s) {
  if (s.size() < 5) throw std::invalid_argument("mle_fit: at least 5 angles required");
  s.validate();
  const std::span<const double> v(s.values);
  const double sk = initial_guesses(v).kappa;
  std::vector<FourFoldVonMises> extra;
  for (double g : {0.0, kHalfPiD / 3.0, 2.0 * kHalfPiD / 3.0, kHalfPiD}) extra.push_back({g, std::max(sk, 1.0)});
  FitResult res = fit_in_box(v, ParameterBox{}, extra);
  if (!res.converged) {
    throw FitFailure("mle_fit: no start converged (" + std::to_string(res.starts.size()) +
                     " starts, best gradient norm " + std::to_string(res.gradient_norm) + ")");
  }
  res.flat_likelihood = likelihood_is_flat(v);
  return res;
}

AngleSample sample(const FourFoldVonMises& p, std::size_t n, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be positive");
  p.validate();
  constexpr int kGrid = 4096;
  double m = 0.0;
  for (int i = 0; i < kGrid; ++i) m = std::max(m, density(kHalfPiD * i / (kGrid - 1), p));
  m *= 1.001;
  std::uniform_real_distribution<double> angle(0.0, kHalfPiD);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AngleSample out;
  out.values.reserve(n);
  while (out.values.size() < n) {
    const double t = angle(rng);
    if (unit(rng) * m <= density(t, p)) out.values.push_back(t);
  }
  return out;
}

Cdf::Cdf(const FourFoldVonMises& p) : p_(p) {
  p_.validate();
  cumulative_.resize(kCdfPanels + 1, 0.0);
  const double h = kHalfPiD / kCdfPanels;
  for (std::size_t i = 0; i < kCdfPanels; ++i) {
    cumulative_[i + 1] = cumulative_[i] + panel_integral(i, (i + 1) * h);
  }
}

double Cdf::panel_integral(std::size_t panel, double upper) const {
  const double a = panel * (kHalfPiD / kCdfPanels);
  if (upper <= a) return 0.0;
  const auto& r = gauss_rule();
  const double half = 0.5 * (upper - a), mid = 0.5 * (upper + a);
  double s = 0.0;
  for (int k = 0; k < kGaussOrder; ++k) s += r.weights[k] * density(mid + half * r.nodes[k], p_);
  return half * s;
}

double Cdf::operator()(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= kHalfPiD) return cumulative_.back();
  const double h = kHalfPiD / kCdfPanels;
  const auto panel = std::min<std::size_t>(static_cast<std::size_t>(theta / h), kCdfPanels - 1);
  return cumulative_[panel] + panel_integral(panel, theta);
}

double cdf(double theta, const FourFoldVonMises& p) { return Cdf(p)(theta); }

double ks_statistic(std::span<const double> values, const Cdf& g) {
  if (values.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double gi = g(sorted[i]);
    d = std::max({d, std::abs(gi - (i + 1) / n), std::abs(gi - i / n)});
  }
  return std::sqrt(n) * d;
}

double uniformity_statistic(std::span<const double> values) {
  ParameterBox alt;
  alt.kappa_lo = kUniformKappa;
  ParameterBox null;
  null.kappa_hi = kUniformKappa;
  const double l1 = fit_in_box(values, alt, {{kHalfPiD / 4, 2.0}, {3 * kHalfPiD / 4, 2.0}}).log_likelihood;
  const double l0 = fit_in_box(values, null, {{0.0, 0.25}, {kHalfPiD, 0.25}}).log_likelihood;
  return l1 - l0;
}

double mean_statistic(std::span<const double> values, double gamma0) {
  ParameterBox fixed;
  fixed.gamma_lo = fixed.gamma_hi = gamma0;
  const double l1 = fit_in_box(values, ParameterBox{}, {{gamma0, 1.0}}).log_likelihood;
  const double l0 = fit_in_box(values, fixed, {{gamma0, 0.0}, {gamma0, 5.0}}).log_likelihood;
  // The constrained region is a subset, so the difference is nonnegative up
  // to optimizer noise.
  return std::max(0.0, l1 - l0);
}

double upper_quantile(std::vector<double> stats, double alpha) {
  if (stats.empty()) throw std::invalid_argument("upper_quantile: no statistics");
  std::sort(stats.begin(), stats.end());
  const double b = static_cast<double>(stats.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  k = std::clamp<std::size_t>(k, 1, stats.size());
  return stats[k - 1];
}

namespace {

template <typename Simulate>
double simulated_critical(std::size_t reps, std::uint64_t seed, double alpha, Simulate&& sim) {
  if (reps == 0) throw std::invalid_argument("mc_reps must be positive");
  std::vector<double> stats(reps);
  parallel_for(reps, [&](std::size_t r) {
    auto rng = derived_rng(seed, r);
    stats[r] = sim(rng);
  });
  return upper_quantile(std::move(stats), alpha);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

TestReport ks_test(const AngleSample& s, const FourFoldVonMises& p, double alpha,
                   std::size_t mc_reps, std::uint64_t seed) {
  check_alpha(alpha);
  s.validate();
  TestReport rep;
  rep.test = "ks";
  rep.group = s.group;
  rep.null_hypothesis = "sample follows the supplied four-fold von Mises model";
  rep.direction = "reject if statistic > critical_value; below means good fit";
  rep.alpha = alpha;
  rep.mc_reps = mc_reps;
  rep.seed = seed;
  rep.n = s.size();
  rep.params = p;
  rep.low_precision = mc_reps < kMinMcReps;
  const Cdf g(p);
  rep.statistic = ks_statistic(s.values, g);
  rep.critical_value = simulated_critical(mc_reps, seed, alpha, [&](std::mt19937_64& rng) {
    return ks_statistic(sample(p, s.size(), rng).values, g);
  });
  rep.reject = rep.statistic > rep.critical_value;
  return rep;
}

TestReport test_uniformity(const AngleSample& s, double alpha, std::size_t mc_reps,
                           std::uint64_t seed) {
  check_alpha(alpha);
  if (s.size() < 5) throw std::invalid_argument("test_uniformity: at least 5 angles required");
  s.validate();
  TestReport rep;
  rep.test = "uniformity";
  rep.group = s.group;
  rep.null_hypothesis = "kappa <= 0.5";
  rep.alpha = alpha;
  rep.mc_reps = mc_reps;
  rep.seed = seed;
  rep.n = s.size();
  rep.low_precision = mc_reps < kMinMcReps;
  rep.params = mle_fit(s).params;
  rep.statistic = uniformity_statistic(s.values);
  rep.critical_value = simulated_critical(mc_reps, seed, alpha, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> k(0.0, kUniformKappa), g(0.0, kHalfPiD);
    const FourFoldVonMises truth{g(rng), k(rng)};
    return uniformity_statistic(sample(truth, s.size(), rng).values);
  });
  rep.reject = rep.statistic > rep.critical_value;
  return rep;
}

TestReport test_mean(const AngleSample& s, double gamma0, double alpha, std::size_t mc_reps,
                     std::uint64_t seed) {
  check_alpha(alpha);
  if (!(gamma0 >= 0.0 && gamma0 <= kHalfPiD)) throw std::invalid_argument("gamma0 must lie in [0, pi/2]");
  if (s.size() < 5) throw std::invalid_argument("test_mean: at least 5 angles required");
  s.validate();
  TestReport rep;
  rep.test = "mean";
  rep.group = s.group;
  rep.null_hypothesis = "gamma = gamma0";
  rep.alpha = alpha;
  rep.mc_reps = mc_reps;
  rep.seed = seed;
  rep.n = s.size();
  rep.gamma0 = gamma0;
  rep.low_precision = mc_reps < kMinMcReps;
  rep.params = mle_fit(s).params;
  rep.statistic = mean_statistic(s.values, gamma0);
  rep.critical_value = simulated_critical(mc_reps, seed, alpha, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> k(0.0, 30.0);
    const FourFoldVonMises truth{gamma0, k(rng)};
    return mean_statistic(sample(truth, s.size(), rng).values, gamma0);
  });
  rep.reject = rep.statistic > rep.critical_value;
  return rep;
}

double circular_correlation(const std::vector<std::pair<double, double>>& pairs, bool same_category) {
  if (pairs.size() < 3) throw std::invalid_argument("circular_correlation: at least 3 pairs required");
  std::vector<std::pair<double, double>> p = pairs;
  if (same_category) {
    for (auto& [a, b] : p) {
      if (a > b) std::swap(a, b);
    }
  }
  double num = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = std::sin(p[i].first - p[j].first);
      const double dy = std::sin(p[i].second - p[j].second);
      num += dx * dy;
      sx += dx * dx;
      sy += dy * dy;
    }
  }
  const double den = std::sqrt(sx * sy);
  if (!(den > 0.0)) throw DegenerateError("circular_correlation: angles are constant");
  return std::clamp(num / den, -1.0, 1.0);
}

void write_density_csv(std::ostream& out, const FourFoldVonMises& p, std::size_t points) {
  if (points < 2) throw std::invalid_argument("write_density_csv: need at least 2 points");
  out.precision(12);
  out << "theta,density\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double t = kHalfPiD * i / (points - 1);
    out << t << ',' << density(t, p) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const AngleSample& s, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("write_histogram_csv: need at least 1 bin");
  std::vector<std::size_t> count(bins, 0);
  for (double v : s.values) {
    auto b = static_cast<std::size_t>(v / kHalfPiD * bins);
    ++count[std::min(b, bins - 1)];
  }
  const double w = kHalfPiD / bins;
  const double n = std::max<double>(1.0, s.size());
  out.precision(12);
  out << "lower,upper,count,density\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out << b * w << ',' << (b + 1) * w << ',' << count[b] << ',' << count[b] / (n * w) << '\n';
  }
}

}  // namespace aggorient
