#include "cogradio/dist_approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cogradio/error.hpp"
#include "cogradio/special_functions.hpp"

namespace cogradio {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(fmt::format("{}: non-finite argument {}", what, x));
}

// Shared pieces of the closed-form cdf and its derivative.
struct SinrTerms {
  double a_term = 0.0;      // P(|H|^2 > K G c / P_t) P(N <= I K / P_t)
  double b_term = 0.0;      // integral over N > I K / P_t
  double b_density = 0.0;   // s * exp(E - u^2/2) / sqrt(2 pi)
  double shifted_mean = 0.0;
};

SinrTerms sinr_terms(double gamma, const SinrDistParams& p) {
  const double c = p.total_noise;
  const double m = p.direct_mean;
  const double k = static_cast<double>(p.k_subcarriers);
  const double knee = p.i_threshold * k / p.p_total;  // N where both power caps coincide
  const double mu = p.nsp.mean;
  const double s2 = p.nsp.variance;
  const double theta = gamma * c / (m * p.i_threshold);

  SinrTerms t;
  const double power_limited_tail = std::exp(-k * gamma * c / (p.p_total * m));
  if (s2 == 0.0) {
    // N is the constant mu
    if (mu <= knee) {
      t.a_term = power_limited_tail;
    } else {
      t.b_term = std::exp(-theta * mu);
    }
    t.shifted_mean = mu;
    return t;
  }
  const double s = std::sqrt(s2);
  const double y = (knee - mu) / (std::numbers::sqrt2 * s);
  t.a_term = 0.5 * power_limited_tail * std::erfc(-y);

  const double z = (knee - mu + theta * s2) / (std::numbers::sqrt2 * s);
  const double log_density = -theta * knee - (knee - mu) * (knee - mu) / (2.0 * s2);
  if (z >= 0.0) {
    t.b_term = 0.5 * std::exp(log_density) * erfcx(z);
  } else {
    t.b_term = 0.5 * std::exp(-theta * mu + 0.5 * theta * theta * s2) * std::erfc(z);
  }
  t.b_density = s * std::exp(log_density) / std::sqrt(2.0 * std::numbers::pi);
  t.shifted_mean = mu - theta * s2;
  return t;
}

}  // namespace

GaussianParams lemma1_gaussian(std::span<const Complex> channel_means, double shared_variance,
                               VarianceConvention convention) {
  if (channel_means.empty()) throw ParameterError("lemma1_gaussian: empty mean vector");
  if (!(shared_variance > 0.0) || !std::isfinite(shared_variance)) {
    throw ParameterError(fmt::format("lemma1_gaussian: variance must be positive, got {}",
                                     shared_variance));
  }
  const double k = static_cast<double>(channel_means.size());
  double noncentrality = 0.0;
  for (const Complex& m : channel_means) noncentrality += std::norm(m) / shared_variance;
  const double v2 = shared_variance * shared_variance;
  if (convention == VarianceConvention::PerComponent) {
    return {shared_variance * (2.0 * k + noncentrality), v2 * (4.0 * k + 4.0 * noncentrality)};
  }
  return {shared_variance * (k + noncentrality), v2 * (k + 2.0 * noncentrality)};
}

void SinrDistParams::validate() const {
  if (!(direct_mean > 0.0 && total_noise > 0.0 && p_total > 0.0 && i_threshold > 0.0)) {
    throw ParameterError("SinrDistParams: direct_mean, total_noise, p_total and i_threshold must be positive");
  }
  if (k_subcarriers < 1) throw ParameterError("SinrDistParams: k_subcarriers must be >= 1");
  if (!(nsp.variance >= 0.0) || !std::isfinite(nsp.mean)) {
    throw ParameterError("SinrDistParams: invalid aggregate cross-gain parameters");
  }
}

double sinr_cdf_unclamped(double gamma, const SinrDistParams& p) {
  require_finite(gamma, "sinr_cdf");
  p.validate();
  if (gamma <= 0.0) return 0.0;
  const SinrTerms t = sinr_terms(gamma, p);
  return 1.0 - t.a_term - t.b_term;
}

double sinr_cdf(double gamma, const SinrDistParams& p) {
  return std::clamp(sinr_cdf_unclamped(gamma, p), 0.0, 1.0);
}

double sinr_pdf(double gamma, const SinrDistParams& p) {
  require_finite(gamma, "sinr_pdf");
  p.validate();
  if (gamma < 0.0) return 0.0;
  const SinrTerms t = sinr_terms(gamma, p);
  const double c = p.total_noise;
  const double m = p.direct_mean;
  const double k = static_cast<double>(p.k_subcarriers);
  const double d_a = k * c / (p.p_total * m) * t.a_term;
  const double d_b = c / (m * p.i_threshold) * (t.shifted_mean * t.b_term + t.b_density);
  return std::max(0.0, d_a + d_b);
}

ScaledChiSquare prop3_approx(std::span<const double> weights, std::span<const double> means) {
  if (weights.empty() || weights.size() != means.size()) {
    throw ParameterError(fmt::format("prop3_approx: need equal nonempty vectors, got {} and {}",
                                     weights.size(), means.size()));
  }
  double noncentrality = 0.0;
  double weighted = 0.0;
  bool any_positive = false;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !(means[k] >= 0.0)) {
      throw ParameterError("prop3_approx: weights and means must be nonnegative");
    }
    any_positive = any_positive || weights[k] > 0.0;
    noncentrality += means[k];
    weighted += weights[k] * (2.0 + means[k]);
  }
  if (!any_positive) throw ParameterError("prop3_approx: all weights are zero");
  const int dof = 2 * static_cast<int>(weights.size());
  // a common weight factors out of the ratio exactly
  const bool equal = std::all_of(weights.begin(), weights.end(),
                                 [&](double w) { return w == weights.front(); });
  if (equal) return {noncentrality, dof, weights.front()};
  return {noncentrality, dof, weighted / (dof + noncentrality)};
}

double collision_prob(double i_th, const ScaledChiSquare& s) {
  if (!(i_th > 0.0)) throw ParameterError(fmt::format("collision_prob: i_th must be positive, got {}", i_th));
  if (s.dof < 2 || s.dof % 2 != 0 || !(s.scale > 0.0) || !(s.noncentrality >= 0.0)) {
    throw ParameterError("collision_prob: invalid scaled chi-square");
  }
  const double x = (i_th / s.scale) / (2.0 * (1.0 + s.noncentrality / s.dof));
  return regularized_upper_gamma(s.dof / 2, x);
}

double scaled_chi_square_cdf(double x, const ScaledChiSquare& s) {
  if (x <= 0.0) return 0.0;
  return 1.0 - collision_prob(x, s);
}

double deterministic_cap(double i_th, double eps, int k_subcarriers) {
  if (!(i_th > 0.0)) throw ParameterError(fmt::format("deterministic_cap: i_th must be positive, got {}", i_th));
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError(fmt::format("deterministic_cap: eps must lie in (0, 1), got {}", eps));
  }
  if (k_subcarriers < 2) {
    throw ParameterError(fmt::format("deterministic_cap: needs K >= 2, got {}", k_subcarriers));
  }
  const double k = static_cast<double>(k_subcarriers);
  const double root_factorial = std::exp(log_factorial(k_subcarriers) / k);
  // 1 - (1 - eps)^{1/K}, without cancellation for small eps / large K
  const double gap = -std::expm1(std::log1p(-eps) / k);
  return k * i_th / (-root_factorial * std::log(gap));
}

GaussianParams nsp_params(const ScenarioSpec& scenario, const EstimationModel& est,
                          int k_subcarriers) {
  if (!scenario.imperfect_csi()) {
    throw ContractError("nsp_params: perfect-CSI scenario uses lemma1_gaussian on the true channels");
  }
  scenario.validate();
  if (k_subcarriers < 1) throw ParameterError("nsp_params: k_subcarriers must be >= 1");
  const double k = static_cast<double>(k_subcarriers);
  const double rho2 = scenario.rho * scenario.rho;
  const double spread = est.estimate_variance * (1.0 + rho2) * (1.0 + rho2);
  switch (scenario.kind) {
    case ScenarioKind::AverageCase:
      return {2.0 * k * spread, 4.0 * k * spread * spread};
    case ScenarioKind::WorstCase: {
      const double offset2 = est.error_variance * (1.0 - rho2) / (1.0 - *scenario.pr);
      const double noncentrality = k * offset2 / spread;
      return {spread * (2.0 * k + noncentrality), spread * spread * (4.0 * k + 4.0 * noncentrality)};
    }
    case ScenarioKind::Probabilistic: {
      const double one_minus = 1.0 - rho2;
      return {2.0 * k * spread + 2.0 * k * one_minus * one_minus * est.error_variance,
              4.0 * k * spread * spread};
    }
    case ScenarioKind::PerfectDeterministic:
      break;
  }
  throw ContractError("nsp_params: unreachable scenario");
}

}  // namespace cogradio
