#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace aggorient {

inline constexpr double kMaxKappa = 700.0;

/// Equal-weight mixture of von Mises densities at gamma, -gamma, pi - gamma
/// and gamma - pi, folded onto [0, pi/2].
struct FourFoldVonMises {
  double gamma = 0.0;
  double kappa = 0.0;
  void validate() const;
};

/// Normalized orientation angles of one group, all in [0, pi/2].
struct AngleSample {
  std::vector<double> values;
  std::string group;
  std::size_t size() const { return values.size(); }
  void validate() const;
};

/// Parameter region for constrained maximization.
struct ParameterBox {
  double gamma_lo = 0.0;
  double gamma_hi = 1.5707963267948966;
  double kappa_lo = 0.0;
  double kappa_hi = kMaxKappa;
  FourFoldVonMises project(const FourFoldVonMises& p) const;
};

struct LikelihoodDerivatives {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();  // (d/dgamma, d/dkappa)
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

struct StartTrace {
  FourFoldVonMises start;
  FourFoldVonMises end;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct FitResult {
  FourFoldVonMises params;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;  // projected onto the feasible box
  std::size_t iterations = 0;
  bool converged = false;
  bool flat_likelihood = false;
  std::vector<StartTrace> starts;
};

struct TestReport {
  std::string test;
  std::string group;
  std::string null_hypothesis;
  std::string direction = "reject if statistic > critical_value";
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.05;
  std::size_t mc_reps = 0;
  std::size_t n = 0;
  bool reject = false;
  bool low_precision = false;
  std::uint64_t seed = 0;
  FourFoldVonMises params;  // fitted model (ks) or unconstrained fit (likelihood-ratio tests)
  double gamma0 = 0.0;      // mean test only
};

double logcosh(double x);

double log_density(double theta, const FourFoldVonMises& p);
double density(double theta, const FourFoldVonMises& p);

/// Sum of log densities, including the N log(2/pi) constant.
double log_likelihood(std::span<const double> values, const FourFoldVonMises& p);
double log_likelihood(const AngleSample& s, const FourFoldVonMises& p);

/// Value, gradient and Hessian of the log likelihood in (gamma, kappa).
LikelihoodDerivatives likelihood_derivatives(std::span<const double> values,
                                             const FourFoldVonMises& p);

/// Moment-based starting values: sample angular mean and the bias-corrected
/// mean resultant length inverted through I1/I0.
FourFoldVonMises initial_guesses(std::span<const double> values);
FourFoldVonMises initial_guesses(const AngleSample& s);

/// Solves I1(k)/I0(k) = target for k in [0, kMaxKappa] by bisection.
double invert_bessel_ratio(double target);

/// Projected Newton-Raphson from one start. Never throws on non-convergence;
/// the caller inspects the trace.
StartTrace newton_maximize(std::span<const double> values, const FourFoldVonMises& start,
                           const ParameterBox& box = {});

/// Multi-start maximization inside `box`; the 3 x 3 grid around the moment
/// guesses is always used, extra starts are appended. Throws FitFailure when
/// no start produces a finite likelihood.
FitResult fit_in_box(std::span<const double> values, const ParameterBox& box,
                     const std::vector<FourFoldVonMises>& extra_starts = {});

/// Unconstrained maximum likelihood fit. Requires N >= 5.
FitResult mle_fit(const AngleSample& s);

/// True when the profile likelihood of gamma (maximized over kappa) varies by
/// less than the chi-square(1) 95% half-width over all of [0, pi/2], i.e. the
/// data do not locate gamma.
bool likelihood_is_flat(std::span<const double> values);

/// Rejection sampler with a grid-estimated envelope.
AngleSample sample(const FourFoldVonMises& p, std::size_t n, std::mt19937_64& rng);

/// Tabulated CDF built once per parameter pair (composite Gauss-Legendre).
class Cdf {
 public:
  explicit Cdf(const FourFoldVonMises& p);
  double operator()(double theta) const;

 private:
  FourFoldVonMises p_;
  std::vector<double> cumulative_;  // value at each panel's left edge
  double panel_integral(std::size_t panel, double upper) const;
};

double cdf(double theta, const FourFoldVonMises& p);

/// sqrt(N) sup |G - G_N| for the given model.
double ks_statistic(std::span<const double> values, const Cdf& g);

/// R_kappa = max over kappa >= 0.5 minus max over kappa <= 0.5.
double uniformity_statistic(std::span<const double> values);

/// R_gamma = unconstrained max minus max with gamma fixed at gamma0.
double mean_statistic(std::span<const double> values, double gamma0);

/// Order-statistic (1 - alpha) quantile of simulated statistics.
double upper_quantile(std::vector<double> stats, double alpha);

inline constexpr std::size_t kMinMcReps = 100;

TestReport ks_test(const AngleSample& s, const FourFoldVonMises& p, double alpha,
                   std::size_t mc_reps, std::uint64_t seed);
TestReport test_uniformity(const AngleSample& s, double alpha, std::size_t mc_reps,
                           std::uint64_t seed);
TestReport test_mean(const AngleSample& s, double gamma0, double alpha, std::size_t mc_reps,
                     std::uint64_t seed);

/// Angular correlation of paired orientations; with same_category each pair
/// is first ordered as (min, max). Throws DegenerateError when undefined.
double circular_correlation(const std::vector<std::pair<double, double>>& pairs,
                            bool same_category = false);

/// (theta, g) on an even grid over [0, pi/2].
void write_density_csv(std::ostream& out, const FourFoldVonMises& p, std::size_t points = 181);
/// Histogram of the sample over [0, pi/2]: bin edges, count and density.
void write_histogram_csv(std::ostream& out, const AngleSample& s, std::size_t bins = 18);

}  // namespace aggorient
