// Scalar special functions: sine integral, exponential integral, and the
// overflow-safe exponentially scaled Ei combinations used by the closed-form
// reservoir coefficients.

#pragma once

#include <utility>

namespace twinbeam::specfun {

/// Sine integral Si(x) = int_0^x sin(t)/t dt. Odd in x; Si(x) -> pi/2 as
/// x -> +inf. Relative error <= 1e-10 over the tested range (x up to 1e4).
/// Throws std::domain_error for non-finite x.
double si(double x);

/// Principal-value exponential integral Ei(x), x != 0.
/// Throws std::domain_error at x = 0 or non-finite x, std::range_error for
/// x > 709 where e^x overflows (use ei_scaled_pair instead).
double ei(double x);

/// Returns (e^{+u} Ei(-u), e^{-u} Ei(+u)) for u > 0 without intermediate
/// overflow; valid up to u ~ 1e6 and beyond. The components behave like
/// -1/u and +1/u for large u. Throws std::domain_error for u <= 0.
std::pair<double, double> ei_scaled_pair(double u);

}  // namespace twinbeam::specfun
