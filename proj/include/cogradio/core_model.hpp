#pragma once

// System configuration, channel sampling and the posterior model of the
// secondary-to-primary (cross) link given a noisy estimate.

#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "cogradio/grid.hpp"

namespace cogradio {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

struct SystemConfig {
  int n_users = 3;
  int n_subcarriers = 64;
  double p_total = 30.0;      // W, average transmit power budget
  double i_threshold = 10.0;  // W, interference budget at the primary receiver
  double ber_target = 1e-2;
  double noise_power = 1e-13;                 // W
  double primary_interference_power = 1e-13;  // W, received from the primary transmitter
  std::pair<double, double> direct_mean_range{0.0, 2.0};
  Complex cross_mean{0.05, 0.0};
  // Variance of the cross-link value the transmitter observes: the true
  // channel under perfect knowledge, the estimate otherwise.
  double cross_variance = 0.1;
  std::uint64_t rng_seed = 1;

  /// Throws ParameterError on any out-of-range field.
  void validate() const;

  double total_noise() const { return noise_power + primary_interference_power; }
  double nominal_power() const { return p_total / n_subcarriers; }
};

/// Correlated estimate/error description of one cross link.
///
/// `correlation` is rho = sqrt(err / (err + chan)); the estimate variance is
/// err + chan, so rho^2 = err / estimate_variance whenever the three fields
/// describe a realizable joint Gaussian.
struct EstimationModel {
  double correlation = 0.0;
  double error_variance = 0.0;
  double estimate_variance = 1.0;

  static EstimationModel perfect(double channel_variance);
  static EstimationModel from_variances(double error_variance, double channel_variance);
  static EstimationModel from_correlation(double rho, double estimate_variance);

  /// Range checks only; the posterior formulas accept any rho in [0,1].
  void validate() const;
  /// True when rho^2 * estimate_variance == error_variance (to rounding).
  bool is_consistent() const;
};

struct ChannelRealization {
  Grid<double> direct_power_gains;    // |H^ss|^2, users x subcarriers
  std::vector<Complex> cross_gains;   // true H^sp
  std::vector<Complex> cross_estimates;
  std::vector<Complex> cross_errors;
  Grid<double> sinr;                  // at the nominal per-subcarrier power P_t/K
};

/// Per-(user, subcarrier) mean power gains, drawn once per experiment from
/// Uniform(direct_mean_range) on a stream keyed only by cfg.rng_seed.
Grid<double> draw_direct_means(const SystemConfig& cfg);

ChannelRealization sample_realization(const SystemConfig& cfg, const EstimationModel& est,
                                      const Grid<double>& direct_means, Rng& rng);
ChannelRealization sample_realization(const SystemConfig& cfg, const EstimationModel& est,
                                      Rng& rng);

/// Circularly-symmetric complex Gaussian; variance is E|X - mean|^2.
struct ComplexGaussian {
  Complex mean;
  double variance = 0.0;
};

/// Error given estimate: mean rho^2 * estimate, variance (1 - rho^2) * err.
ComplexGaussian posterior_error_params(const EstimationModel& est, Complex estimate);
/// True channel given estimate: mean (1 + rho^2) * estimate, same variance.
ComplexGaussian posterior_channel_params(const EstimationModel& est, Complex estimate);

/// Chebyshev radius Omega with P(|error| <= Omega | estimate) >= pr.
double worst_case_bound(const EstimationModel& est, Complex estimate, double pr);

/// splitmix64 finaliser, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cogradio
