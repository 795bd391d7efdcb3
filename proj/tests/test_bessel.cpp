#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "aggorient/bessel.hpp"

using namespace aggorient;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double ref_log_i0(double x) {
  return static_cast<double>(log(boost::math::cyl_bessel_i(0, big(x))));
}

double ref_ratio(double x) {
  const big b(x);
  return static_cast<double>(boost::math::cyl_bessel_i(1, b) / boost::math::cyl_bessel_i(0, b));
}

}  // namespace

TEST_CASE("log I0 against an extended precision reference") {
  CHECK(bessel::log_i0(0.0) == 0.0);
  for (double x = 0.01; x < 2000.0; x *= 1.07) {
    const double want = ref_log_i0(x);
    CHECK(std::abs(bessel::log_i0(x) - want) <= 1e-13 * std::max(1.0, std::abs(want)));
  }
  // both sides of the series / asymptotic switch
  for (double x : {19.999, 20.0, 20.001}) {
    CHECK(std::abs(bessel::log_i0(x) - ref_log_i0(x)) <= 1e-13 * ref_log_i0(x));
  }
  CHECK(std::isfinite(bessel::log_i0(1e5)));
}

TEST_CASE("I1/I0 and its derivative") {
  CHECK(bessel::ratio_i1_i0(0.0) == 0.0);
  CHECK(bessel::ratio_i1_i0_derivative(0.0) == doctest::Approx(0.5));
  for (double x = 0.01; x < 2000.0; x *= 1.07) {
    const double a = bessel::ratio_i1_i0(x);
    CHECK(std::abs(a - ref_ratio(x)) <= 1e-13);
    CHECK(a < 1.0);
    const double h = 1e-5 * std::max(1.0, x);
    const double fd = (ref_ratio(x + h) - ref_ratio(x - h)) / (2.0 * h);
    CHECK(std::abs(bessel::ratio_i1_i0_derivative(x) - fd) <= 1e-7 * std::max(1.0, std::abs(fd)) + 1e-12);
  }
  // monotone increasing
  double prev = 0.0;
  for (double x = 0.1; x < 100.0; x += 0.1) {
    const double a = bessel::ratio_i1_i0(x);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("double precision Boost agrees where it does not overflow") {
  for (double x : {0.5, 3.0, 15.0, 80.0, 600.0}) {
    CHECK(bessel::log_i0(x) == doctest::Approx(std::log(boost::math::cyl_bessel_i(0, x))).epsilon(1e-13));
  }
}
