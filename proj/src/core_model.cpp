#include "cogradio/core_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cogradio/error.hpp"

namespace cogradio {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(fmt::format("{} must be positive and finite, got {}", name, value));
  }
}

Complex standard_complex_normal(std::normal_distribution<double>& normal, Rng& rng) {
  // unit total variance, half per component
  static const double kHalf = std::sqrt(0.5);
  const double re = normal(rng);
  const double im = normal(rng);
  return {kHalf * re, kHalf * im};
}

}  // namespace

void SystemConfig::validate() const {
  if (n_users < 1) throw ParameterError(fmt::format("n_users must be >= 1, got {}", n_users));
  if (n_subcarriers < 1) {
    throw ParameterError(fmt::format("n_subcarriers must be >= 1, got {}", n_subcarriers));
  }
  require_positive(p_total, "p_total");
  require_positive(i_threshold, "i_threshold");
  require_positive(noise_power, "noise_power");
  require_positive(primary_interference_power, "primary_interference_power");
  require_positive(cross_variance, "cross_variance");
  if (!(ber_target > 0.0 && ber_target < 0.3)) {
    throw ParameterError(fmt::format("ber_target must lie in (0, 0.3), got {}", ber_target));
  }
  const auto [lo, hi] = direct_mean_range;
  if (!(lo >= 0.0 && hi >= lo && std::isfinite(hi))) {
    throw ParameterError(fmt::format("direct_mean_range must satisfy 0 <= lo <= hi, got ({}, {})", lo, hi));
  }
  if (!std::isfinite(cross_mean.real()) || !std::isfinite(cross_mean.imag())) {
    throw ParameterError("cross_mean must be finite");
  }
}

EstimationModel EstimationModel::perfect(double channel_variance) {
  return {0.0, 0.0, channel_variance};
}

EstimationModel EstimationModel::from_variances(double error_variance, double channel_variance) {
  if (!(error_variance >= 0.0) || !(channel_variance >= 0.0) ||
      !(error_variance + channel_variance > 0.0)) {
    throw ParameterError("estimation variances must be nonnegative and not both zero");
  }
  const double total = error_variance + channel_variance;
  return {std::sqrt(error_variance / total), error_variance, total};
}

EstimationModel EstimationModel::from_correlation(double rho, double estimate_variance) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ParameterError(fmt::format("correlation must lie in [0, 1], got {}", rho));
  }
  require_positive(estimate_variance, "estimate_variance");
  return {rho, rho * rho * estimate_variance, estimate_variance};
}

void EstimationModel::validate() const {
  if (!(correlation >= 0.0 && correlation <= 1.0)) {
    throw ParameterError(fmt::format("correlation must lie in [0, 1], got {}", correlation));
  }
  if (!(error_variance >= 0.0) || !std::isfinite(error_variance)) {
    throw ParameterError(fmt::format("error_variance must be nonnegative, got {}", error_variance));
  }
  require_positive(estimate_variance, "estimate_variance");
}

bool EstimationModel::is_consistent() const {
  const double implied = correlation * correlation * estimate_variance;
  return std::abs(implied - error_variance) <= 1e-9 * std::max(1.0, estimate_variance);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Grid<double> draw_direct_means(const SystemConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.rng_seed, 0xD1EC7));
  std::uniform_real_distribution<double> uniform(cfg.direct_mean_range.first,
                                                 cfg.direct_mean_range.second);
  Grid<double> means(cfg.n_users, cfg.n_subcarriers);
  for (int n = 0; n < cfg.n_users; ++n) {
    for (int k = 0; k < cfg.n_subcarriers; ++k) {
      // degenerate range gives the bound exactly
      means(n, k) = cfg.direct_mean_range.first == cfg.direct_mean_range.second
                        ? cfg.direct_mean_range.first
                        : uniform(rng);
    }
  }
  return means;
}

ChannelRealization sample_realization(const SystemConfig& cfg, const EstimationModel& est,
                                      const Grid<double>& direct_means, Rng& rng) {
  cfg.validate();
  est.validate();
  if (!est.is_consistent()) {
    throw ParameterError(fmt::format(
        "correlation {} is incompatible with error variance {} and estimate variance {}",
        est.correlation, est.error_variance, est.estimate_variance));
  }
  const auto users = static_cast<std::size_t>(cfg.n_users);
  const auto carriers = static_cast<std::size_t>(cfg.n_subcarriers);
  if (direct_means.rows() != users || direct_means.cols() != carriers) {
    throw ParameterError("direct_means shape does not match the configuration");
  }

  ChannelRealization real;
  real.direct_power_gains = Grid<double>(users, carriers);
  real.sinr = Grid<double>(users, carriers);
  std::exponential_distribution<double> unit_exp(1.0);
  const double sinr_scale = cfg.nominal_power() / cfg.total_noise();
  for (std::size_t n = 0; n < users; ++n) {
    for (std::size_t k = 0; k < carriers; ++k) {
      const double gain = direct_means(n, k) * unit_exp(rng);
      real.direct_power_gains(n, k) = gain;
      real.sinr(n, k) = sinr_scale * gain;
    }
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  const double rho2 = est.correlation * est.correlation;
  const double estimate_sd = std::sqrt(est.estimate_variance);
  const double residual_sd = std::sqrt((1.0 - rho2) * est.error_variance);
  real.cross_gains.resize(carriers);
  real.cross_estimates.resize(carriers);
  real.cross_errors.resize(carriers);
  for (std::size_t k = 0; k < carriers; ++k) {
    const Complex estimate = cfg.cross_mean + estimate_sd * standard_complex_normal(normal, rng);
    const Complex residual = standard_complex_normal(normal, rng);
    const Complex gain = estimate + (rho2 * estimate + residual_sd * residual);
    real.cross_estimates[k] = estimate;
    real.cross_gains[k] = gain;
    // stored as the difference so gain - estimate - error is exactly zero
    real.cross_errors[k] = gain - estimate;
  }
  return real;
}

ChannelRealization sample_realization(const SystemConfig& cfg, const EstimationModel& est,
                                      Rng& rng) {
  return sample_realization(cfg, est, draw_direct_means(cfg), rng);
}

ComplexGaussian posterior_error_params(const EstimationModel& est, Complex estimate) {
  const double rho2 = est.correlation * est.correlation;
  return {rho2 * estimate, (1.0 - rho2) * est.error_variance};
}

ComplexGaussian posterior_channel_params(const EstimationModel& est, Complex estimate) {
  const double rho2 = est.correlation * est.correlation;
  return {(1.0 + rho2) * estimate, (1.0 - rho2) * est.error_variance};
}

double worst_case_bound(const EstimationModel& est, Complex estimate, double pr) {
  if (!(pr >= 0.0 && pr < 1.0)) {
    throw ParameterError(fmt::format("pr must lie in [0, 1), got {}", pr));
  }
  const ComplexGaussian post = posterior_error_params(est, estimate);
  return std::sqrt(post.variance / (1.0 - pr)) + std::abs(post.mean);
}

}  // namespace cogradio
