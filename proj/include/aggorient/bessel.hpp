#pragma once

namespace aggorient::bessel {

/// log I0(x) for x >= 0, stable far beyond the range where I0 overflows.
/// Power series below x = 20, scaled Hankel asymptotic expansion above.
double log_i0(double x);

/// A(x) = I1(x) / I0(x), x >= 0.
double ratio_i1_i0(double x);

/// dA/dx = 1 - A(x)/x - A(x)^2, with the limit 1/2 at x = 0.
double ratio_i1_i0_derivative(double x);

}  // namespace aggorient::bessel
