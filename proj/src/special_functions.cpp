#include "cogradio/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "cogradio/error.hpp"

namespace cogradio {

namespace {
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr int kMaxGammaOrder = 512;
}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) throw DomainError("erfcx: NaN argument");
  if (x < 0.0) {
    // exp(x^2) overflows beyond |x| ~ 26.6; callers only need this branch
    // for moderate negative arguments.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  // below 10 the rounding of x*x inside exp stays under 1e-14 relative
  if (x < 10.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series sum_n (-1)^n (2n-1)!! / (2x^2)^n, 16 terms suffice for x >= 10
  const double step = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double series = 1.0;
  for (int n = 1; n <= 16; ++n) {
    term *= -(2.0 * n - 1.0) * step;
    series += term;
  }
  return kInvSqrtPi / x * series;
}

double log_factorial(int k) {
  if (k < 0) throw ParameterError(fmt::format("log_factorial: negative argument {}", k));
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double regularized_upper_gamma(int k, double x) {
  if (k < 1 || k > kMaxGammaOrder) {
    throw ParameterError(fmt::format("regularized_upper_gamma: order {} outside [1, {}]", k,
                                     kMaxGammaOrder));
  }
  if (std::isnan(x)) throw DomainError("regularized_upper_gamma: NaN argument");
  if (x < 0.0) throw DomainError(fmt::format("regularized_upper_gamma: negative argument {}", x));
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  // log of each Poisson term, summed with a max shift
  const double log_x = std::log(x);
  std::vector<double> log_terms(static_cast<std::size_t>(k));
  double peak = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    const double lt = -x + j * log_x - log_factorial(j);
    log_terms[static_cast<std::size_t>(j)] = lt;
    peak = std::max(peak, lt);
  }
  if (peak < -745.0) return 0.0;
  double sum = 0.0;
  for (const double lt : log_terms) sum += std::exp(lt - peak);
  return std::min(1.0, std::exp(peak) * sum);
}

}  // namespace cogradio
