#pragma once

// Analytic distribution machinery: Gaussian approximation of the aggregate
// cross-link gain, the closed-form SINR cdf/pdf, the moment-matched scaled
// chi-square for weighted interference sums, the collision probability and
// the deterministic interference cap that enforces it.

#include <span>

#include "cogradio/core_model.hpp"
#include "cogradio/scenario.hpp"

namespace cogradio {

struct GaussianParams {
  double mean = 0.0;
  double variance = 0.0;
};

/// How the shared variance of the complex terms is read.
///   PerComponent: each real component has variance delta^2 (the printed
///                 formulas: mean d2(2K + mu'), variance d2^2(4K + 4mu')).
///   Total:        E|H - mean|^2 = delta^2, as produced by sample_realization
///                 (mean d2(K + mu'), variance d2^2(K + 2mu')).
enum class VarianceConvention { PerComponent, Total };

/// Gaussian approximation of sum_k |H_k|^2 with H_k ~ CN(means[k], shared_variance).
GaussianParams lemma1_gaussian(std::span<const Complex> channel_means, double shared_variance,
                               VarianceConvention convention = VarianceConvention::PerComponent);

struct SinrDistParams {
  double direct_mean = 1.0;  // mean of |H^ss|^2 (exponential)
  double total_noise = 1.0;
  double p_total = 1.0;
  double i_threshold = 1.0;
  int k_subcarriers = 1;
  GaussianParams nsp;

  void validate() const;
};

/// cdf before clamping to [0, 1]; exposed so callers can log the excursion.
double sinr_cdf_unclamped(double gamma, const SinrDistParams& p);
/// cdf of min(P_t/K, I/N) |H^ss|^2 / noise with N Gaussian.
double sinr_cdf(double gamma, const SinrDistParams& p);
/// Derivative of sinr_cdf.
double sinr_pdf(double gamma, const SinrDistParams& p);

/// weight * noncentral chi-square(dof, noncentrality).
struct ScaledChiSquare {
  double noncentrality = 0.0;
  int dof = 2;
  double scale = 1.0;
};

/// Moment-matched approximation of sum_k weights[k] |Xi_k|^2 where
/// |Xi_k|^2 ~ chi-square(2, means[k]).
ScaledChiSquare prop3_approx(std::span<const double> weights, std::span<const double> means);

/// P(scale * chi2_D(delta') > i_th) via the central approximation
/// Q(D/2, (i_th/scale) / (2 (1 + delta'/D))).
double collision_prob(double i_th, const ScaledChiSquare& s);

/// 1 - collision_prob(x, s): the approximate cdf of the weighted sum.
double scaled_chi_square_cdf(double x, const ScaledChiSquare& s);

/// Largest weighted transmit power sum_k alpha_k sum_n phi P for which the
/// collision probability stays below eps:
///   K i_th / ( -(K!)^{1/K} ln(1 - (1 - eps)^{1/K}) ).
double deterministic_cap(double i_th, double eps, int k_subcarriers);

/// Gaussian parameters of the aggregate cross gain for the imperfect-CSI
/// regimes, in the printed (PerComponent) convention.
GaussianParams nsp_params(const ScenarioSpec& scenario, const EstimationModel& est,
                          int k_subcarriers);

}  // namespace cogradio
