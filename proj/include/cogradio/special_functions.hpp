#pragma once

namespace cogradio {

/// Scaled complementary error function exp(x^2) * erfc(x).
double erfcx(double x);

/// Regularized upper incomplete gamma Q(k, x) = Gamma(k, x) / Gamma(k) for
/// integer 1 <= k <= 512, via Q(k, x) = exp(-x) * sum_{j<k} x^j / j!.
double regularized_upper_gamma(int k, double x);

/// ln(k!) for k >= 0.
double log_factorial(int k);

}  // namespace cogradio
