#include "cogradio/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cogradio/dist_approx.hpp"
#include "cogradio/error.hpp"

namespace cogradio {

namespace {
constexpr double kLn2 = std::numbers::ln2;

double product_x(double sinr, double p, double zeta, double min_term) {
  return zeta * sinr * p / min_term;
}
}  // namespace

double zeta(double ber_target) {
  if (!(ber_target > 0.0 && ber_target < 0.3)) {
    throw ParameterError(fmt::format("zeta: ber_target must lie in (0, 0.3), got {}", ber_target));
  }
  return -1.5 / std::log(ber_target / 0.3);
}

double ScenarioWeights::min_term(const SystemConfig& cfg) const {
  return std::min(cfg.nominal_power(), i_eff / nsp_value);
}

ScenarioWeights scenario_weights(const ScenarioSpec& scenario, const ChannelRealization& real,
                                 const EstimationModel& est, const SystemConfig& cfg) {
  scenario.validate();
  const auto carriers = static_cast<std::size_t>(cfg.n_subcarriers);
  if (real.cross_gains.size() != carriers || real.cross_estimates.size() != carriers) {
    throw ParameterError("scenario_weights: realization does not match n_subcarriers");
  }
  if (scenario.imperfect_csi() && std::abs(scenario.rho - est.correlation) > 1e-12) {
    throw ParameterError(fmt::format("scenario rho {} disagrees with estimation model rho {}",
                                     scenario.rho, est.correlation));
  }

  ScenarioWeights out;
  out.w.resize(carriers);
  out.i_eff = cfg.i_threshold;
  const double rho2 = scenario.rho * scenario.rho;
  switch (scenario.kind) {
    case ScenarioKind::PerfectDeterministic:
      for (std::size_t k = 0; k < carriers; ++k) out.w[k] = std::norm(real.cross_gains[k]);
      break;
    case ScenarioKind::AverageCase:
      for (std::size_t k = 0; k < carriers; ++k) {
        out.w[k] = std::norm(real.cross_estimates[k] * (1.0 + rho2));
      }
      break;
    case ScenarioKind::WorstCase:
      for (std::size_t k = 0; k < carriers; ++k) {
        // error radius aligned with the estimate's phase
        const double omega = worst_case_bound(est, real.cross_estimates[k], *scenario.pr);
        const double reach = std::abs(real.cross_estimates[k]) + omega;
        out.w[k] = reach * reach;
      }
      break;
    case ScenarioKind::Probabilistic:
      for (std::size_t k = 0; k < carriers; ++k) {
        // alpha_k = var (2 + |mean|^2 / var), written without the division
        const ComplexGaussian post = posterior_channel_params(est, real.cross_estimates[k]);
        out.w[k] = 2.0 * post.variance + std::norm(post.mean);
      }
      out.i_eff = deterministic_cap(cfg.i_threshold, *scenario.eps, cfg.n_subcarriers);
      break;
  }
  if (scenario.kind == ScenarioKind::Probabilistic) {
    out.nsp_value = nsp_params(scenario, est, cfg.n_subcarriers).mean;
  } else {
    out.nsp_value = 0.0;
    for (const double w : out.w) out.nsp_value += w;
  }
  if (!(out.nsp_value > 0.0)) {
    throw ParameterError("scenario_weights: aggregate cross gain is zero");
  }
  return out;
}

DualState initial_duals(const SystemConfig& cfg, const ScenarioWeights& weights) {
  DualState d;
  const double k = static_cast<double>(cfg.n_subcarriers);
  d.mu = k / (cfg.p_total * kLn2);
  d.eta = k / (weights.i_eff * kLn2);
  d.step1 = 0.1 * d.mu / cfg.p_total;
  d.step2 = 0.1 * d.eta / weights.i_eff;
  d.iteration = 1;
  d.lambda.assign(static_cast<std::size_t>(cfg.n_subcarriers), 0.0);
  return d;
}

double water_fill(double sinr, double w, const DualState& duals, double zeta, double min_term) {
  const double price = duals.mu + duals.eta * w;
  if (!(price > 0.0)) {
    throw ContractError("water_fill: mu + eta w must be positive (unbounded water level)");
  }
  if (!(sinr > 0.0)) return 0.0;
  const double level = 1.0 / (kLn2 * price);
  const double floor = min_term / (zeta * sinr);
  return std::max(level - floor, 0.0);
}

double subcarrier_metric(double sinr, double p_star, double zeta, double min_term) {
  if (!(p_star > 0.0)) return 0.0;
  const double x = product_x(sinr, p_star, zeta, min_term);
  return x / (kLn2 * (1.0 + x)) + std::log1p(x) / kLn2;
}

std::vector<int> assign_subcarriers(const Grid<double>& metrics) {
  std::vector<int> users(metrics.cols(), 0);
  for (std::size_t k = 0; k < metrics.cols(); ++k) {
    double best = metrics(0, k);
    for (std::size_t n = 1; n < metrics.rows(); ++n) {
      if (metrics(n, k) > best) {
        best = metrics(n, k);
        users[k] = static_cast<int>(n);
      }
    }
  }
  return users;
}

double constellation(double sinr, const DualState& duals, double w, double zeta, double min_term) {
  const double price = duals.mu + duals.eta * w;
  return std::max(1.0, zeta * sinr / (kLn2 * min_term * price));
}

int quantize_rate(double m_star) {
  int rate = 0;
  for (const int candidate : {2, 4, 6, 8, 10}) {
    if (std::ldexp(1.0, candidate) <= m_star) rate = candidate;
  }
  return rate;
}

AllocationResult allocate(const Grid<double>& sinr, const ScenarioWeights& weights,
                          const DualState& duals, double zeta, double min_term,
                          const SystemConfig& cfg) {
  const std::size_t users = sinr.rows();
  const std::size_t carriers = sinr.cols();
  if (weights.w.size() != carriers) throw ParameterError("allocate: weight vector length mismatch");

  Grid<double> potential(users, carriers);
  Grid<double> metric(users, carriers);
  for (std::size_t n = 0; n < users; ++n) {
    for (std::size_t k = 0; k < carriers; ++k) {
      const double p = water_fill(sinr(n, k), weights.w[k], duals, zeta, min_term);
      potential(n, k) = p;
      metric(n, k) = subcarrier_metric(sinr(n, k), p, zeta, min_term);
    }
  }

  AllocationResult r;
  r.assignment = assign_subcarriers(metric);
  r.phi = Grid<std::uint8_t>(users, carriers, 0);
  r.power = Grid<double>(users, carriers, 0.0);
  r.constellation = Grid<double>(users, carriers, 1.0);
  r.rates = Grid<double>(users, carriers, 0.0);
  r.quantized_rates = Grid<double>(users, carriers, 0.0);
  r.cutoff = Grid<double>(users, carriers, 0.0);
  r.sinr = sinr;
  r.min_term = min_term;
  r.zeta = zeta;
  r.duals = duals;
  r.duals.lambda.assign(carriers, 0.0);

  for (std::size_t k = 0; k < carriers; ++k) {
    const double price = duals.mu + duals.eta * weights.w[k];
    for (std::size_t n = 0; n < users; ++n) r.cutoff(n, k) = kLn2 * price * min_term / zeta;

    // lambda sits between the best and second-best metric
    double first = 0.0;
    double second = 0.0;
    for (std::size_t n = 0; n < users; ++n) {
      const double m = metric(n, k);
      if (m > first) {
        second = first;
        first = m;
      } else if (m > second) {
        second = m;
      }
    }
    r.duals.lambda[k] = 0.5 * (first + second);

    const auto chosen = static_cast<std::size_t>(r.assignment[k]);
    r.phi(chosen, k) = 1;
    const double p = potential(chosen, k);
    if (p > 0.0) {
      const double m_star = constellation(sinr(chosen, k), duals, weights.w[k], zeta, min_term);
      r.power(chosen, k) = p;
      r.constellation(chosen, k) = m_star;
      r.rates(chosen, k) = std::log2(m_star);
      r.quantized_rates(chosen, k) = quantize_rate(m_star);
      r.feasibility.power_used += p;
      r.feasibility.interference_used += p * weights.w[k];
      r.ase += r.rates(chosen, k);
      r.ase_quantized += r.quantized_rates(chosen, k);
    }
  }
  r.feasibility.power_budget = cfg.p_total;
  r.feasibility.interference_budget = weights.i_eff;
  return r;
}

DualState subgradient_update(const DualState& duals, const AllocationResult& result,
                             const ScenarioWeights& weights, const SystemConfig& cfg) {
  DualState next = duals;
  const double power_residual = cfg.p_total - result.feasibility.power_used;
  const double interference_residual = weights.i_eff - result.feasibility.interference_used;
  next.mu = std::max(0.0, duals.mu - duals.step1 * power_residual);
  next.eta = std::max(0.0, duals.eta - duals.step2 * interference_residual);
  const double shrink = std::sqrt(static_cast<double>(duals.iteration) / (duals.iteration + 1));
  next.step1 = duals.step1 * shrink;
  next.step2 = duals.step2 * shrink;
  next.iteration = duals.iteration + 1;
  return next;
}

double ase(std::span<const AllocationResult> results, RateMode mode) {
  if (results.empty()) throw ParameterError("ase: no solved realizations");
  double total = 0.0;
  for (const AllocationResult& r : results) {
    total += mode == RateMode::Continuous ? r.ase : r.ase_quantized;
  }
  return total / static_cast<double>(results.size());
}

KktReport verify_kkt(const AllocationResult& result, const DualState& duals,
                     const ScenarioWeights& weights, const SystemConfig& cfg, double tol,
                     std::optional<double> average_power) {
  KktReport rep;
  const double power_used = average_power.value_or(result.feasibility.power_used);
  const double interference_used = result.feasibility.interference_used;
  rep.power_slack = cfg.p_total - power_used;
  rep.interference_slack = weights.i_eff - interference_used;
  rep.dual_feasible = duals.mu >= 0.0 && duals.eta >= 0.0;

  const double cost_scale = duals.mu * cfg.p_total + duals.eta * weights.i_eff;
  if (cost_scale > 0.0) {
    rep.power_complementarity = std::abs(duals.mu * rep.power_slack) / cost_scale;
    rep.interference_complementarity = std::abs(duals.eta * rep.interference_slack) / cost_scale;
  }
  rep.primal_violation = std::max({0.0, -rep.power_slack / cfg.p_total,
                                   -rep.interference_slack / weights.i_eff});

  const std::size_t users = result.sinr.rows();
  const std::size_t carriers = result.sinr.cols();
  for (std::size_t k = 0; k < carriers; ++k) {
    const double price = duals.mu + duals.eta * weights.w[k];
    double best_metric = 0.0;
    double chosen_metric = 0.0;
    for (std::size_t n = 0; n < users; ++n) {
      const double s = result.sinr(n, k);
      const double candidate = subcarrier_metric(
          s, water_fill(s, weights.w[k], duals, result.zeta, result.min_term), result.zeta,
          result.min_term);
      best_metric = std::max(best_metric, candidate);
      if (!result.phi(n, k)) continue;
      chosen_metric = candidate;
      // d/dP of log2(1 + zeta s P / min_term) - price * P
      const double slope0 = result.zeta * s / (result.min_term * kLn2);
      const double p = result.power(n, k);
      if (p > 0.0) {
        const double x = product_x(s, p, result.zeta, result.min_term);
        const double gradient = slope0 / (1.0 + x);
        rep.stationarity = std::max(rep.stationarity, std::abs(gradient - price) / price);
      } else {
        rep.stationarity = std::max(rep.stationarity, std::max(0.0, slope0 - price) / price);
      }
    }
    if (best_metric > 0.0) {
      rep.assignment_gap = std::max(rep.assignment_gap, (best_metric - chosen_metric) / best_metric);
    }
  }

  rep.pass = rep.dual_feasible && rep.power_complementarity <= tol &&
             rep.interference_complementarity <= tol && rep.stationarity <= tol &&
             rep.assignment_gap <= tol && rep.primal_violation <= tol;
  return rep;
}

}  // namespace cogradio
