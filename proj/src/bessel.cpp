#include "aggorient/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace aggorient::bessel {
namespace {

constexpr double kSeriesLimit = 20.0;

// I0 and I1 by their power series; all terms positive so no cancellation.
void series(double x, double& i0, double& i1) {
  const double q = 0.25 * x * x;
  double t0 = 1.0;      // (x/2)^{2k} / (k!)^2
  double t1 = 0.5 * x;  // (x/2)^{2k+1} / (k! (k+1)!)
  i0 = t0;
  i1 = t1;
  for (int k = 1; k < 200; ++k) {
    t0 *= q / (static_cast<double>(k) * k);
    t1 *= q / (static_cast<double>(k) * (k + 1));
    i0 += t0;
    i1 += t1;
    if (t0 < 1e-17 * i0 && t1 < 1e-17 * i1) break;
  }
}

// sqrt(2 pi x) e^{-x} I_nu(x) ~ sum_k (-1)^k prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! (8x)^k)
double scaled_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) > std::abs(prev)) break;  // divergent tail
    sum += term;
    prev = term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double log_i0(double x) {
  if (!(x >= 0.0)) throw std::domain_error("log_i0: argument must be nonnegative");
  if (x < kSeriesLimit) {
    double i0 = 0.0, i1 = 0.0;
    series(x, i0, i1);
    return std::log(i0);
  }
  return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(scaled_asymptotic(0.0, x));
}

double ratio_i1_i0(double x) {
  if (!(x >= 0.0)) throw std::domain_error("ratio_i1_i0: argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < kSeriesLimit) {
    double i0 = 0.0, i1 = 0.0;
    series(x, i0, i1);
    return i1 / i0;
  }
  return scaled_asymptotic(1.0, x) / scaled_asymptotic(0.0, x);
}

double ratio_i1_i0_derivative(double x) {
  if (x < 1e-6) return 0.5 - 3.0 * x * x / 16.0;
  const double a = ratio_i1_i0(x);
  return 1.0 - a / x - a * a;
}

}  // namespace aggorient::bessel
