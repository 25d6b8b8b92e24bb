#include "cogradio/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "cogradio/error.hpp"

namespace cogradio {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxBisection = 400;
constexpr double kBracketTol = 1e-13;
constexpr double kFeasibilityTol = 1e-6;

// Per-realization data that stays fixed while the multipliers move.
struct Problem {
  ScenarioWeights weights;
  double min_term = 0.0;
  Grid<double> sinr;
  // Water-fill floor of the user that wins subcarrier k for any multipliers
  // (the metric is increasing in SINR at a shared water level).
  std::vector<double> floor;
};

Problem make_problem(const SystemConfig& cfg, const EstimationModel& est,
                     const ScenarioSpec& scenario, const ChannelRealization& real, double z) {
  Problem p;
  p.weights = scenario_weights(scenario, real, est, cfg);
  p.min_term = p.weights.min_term(cfg);
  p.sinr = effective_sinr(real, p.min_term, cfg);
  p.floor.assign(p.sinr.cols(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < p.sinr.cols(); ++k) {
    double best = 0.0;
    for (std::size_t n = 0; n < p.sinr.rows(); ++n) best = std::max(best, p.sinr(n, k));
    if (best > 0.0) p.floor[k] = p.min_term / (z * best);
  }
  return p;
}

struct Usage {
  double power = 0.0;
  double interference = 0.0;
};

Usage usage(const Problem& p, double mu, double eta) {
  Usage u;
  for (std::size_t k = 0; k < p.floor.size(); ++k) {
    const double level = 1.0 / (kLn2 * (mu + eta * p.weights.w[k]));
    const double power = std::max(level - p.floor[k], 0.0);
    u.power += power;
    u.interference += power * p.weights.w[k];
  }
  return u;
}

// Smallest eta keeping the realization inside its interference budget at mu.
double best_eta(const Problem& p, double mu, double hint) {
  const double budget = p.weights.i_eff;
  if (usage(p, mu, 0.0).interference <= budget) return 0.0;
  double lo = 0.0;
  double hi = hint > 0.0 ? hint : 1.0 / budget;
  while (usage(p, mu, hi).interference > budget) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ContractError("best_eta: interference bracket diverged");
  }
  for (int i = 0; i < kMaxBisection && hi - lo > kBracketTol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (usage(p, mu, mid).interference > budget ? lo : hi) = mid;
  }
  return hi;
}

double average_power(std::span<const Problem> problems, double mu, std::vector<double>& etas) {
  double total = 0.0;
  for (std::size_t r = 0; r < problems.size(); ++r) {
    etas[r] = best_eta(problems[r], mu, etas[r]);
    total += usage(problems[r], mu, etas[r]).power;
  }
  return total / static_cast<double>(problems.size());
}

// Bisection on mu with the inner etas re-solved exactly; returns the feasible side.
double polish_mu(std::span<const Problem> problems, double p_total, double mu_start,
                 double mu_floor, std::vector<double>& etas) {
  if (average_power(problems, mu_floor, etas) <= p_total) return mu_floor;
  double hi = std::max(mu_start, mu_floor);
  double lo = mu_floor;
  if (average_power(problems, hi, etas) > p_total) {
    do {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw ContractError("polish_mu: power bracket diverged");
    } while (average_power(problems, hi, etas) > p_total);
  } else {
    double probe = hi;
    while (probe > mu_floor) {
      probe = std::max(0.5 * probe, mu_floor);
      if (average_power(problems, probe, etas) > p_total) {
        lo = probe;
        break;
      }
      hi = probe;
    }
  }
  for (int i = 0; i < kMaxBisection && hi - lo > kBracketTol * hi; ++i) {
    const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    (average_power(problems, mid, etas) > p_total ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double EnsembleSolution::ase(RateMode mode) const { return cogradio::ase(results, mode); }

Grid<double> effective_sinr(const ChannelRealization& real, double min_term,
                            const SystemConfig& cfg) {
  Grid<double> out = real.sinr;
  const double factor = min_term / cfg.nominal_power();
  for (double& v : out.values()) v *= factor;
  return out;
}

EnsembleSolution solve_ensemble(const SystemConfig& cfg, const EstimationModel& est,
                                const ScenarioSpec& scenario,
                                std::span<const ChannelRealization> realizations,
                                const SolverOptions& options) {
  cfg.validate();
  est.validate();
  scenario.validate();
  if (realizations.empty()) throw ParameterError("solve_ensemble: no realizations");
  if (options.max_iter < 1 || options.patience < 1 || !(options.rel_tol > 0.0)) {
    throw ParameterError("solve_ensemble: invalid solver options");
  }

  const double z = zeta(cfg.ber_target);
  const std::size_t count = realizations.size();
  const double inv_count = 1.0 / static_cast<double>(count);
  std::vector<Problem> problems;
  problems.reserve(count);
  for (const ChannelRealization& real : realizations) {
    problems.push_back(make_problem(cfg, est, scenario, real, z));
  }

  std::vector<DualState> duals;
  duals.reserve(count);
  for (const Problem& p : problems) duals.push_back(initial_duals(cfg, p.weights));
  const double mu0 = duals.front().mu;
  const double mu_floor = 1e-12 * mu0;  // keeps the water level finite when every eta is zero

  EnsembleSolution sol;
  double previous_dual = std::numeric_limits<double>::quiet_NaN();
  int calm = 0;
  std::vector<AllocationResult> iterate(count);
  for (int i = 1; i <= options.max_iter; ++i) {
    IterationRecord rec;
    rec.iteration = i;
    rec.mu = duals.front().mu;
    double scaled_power = 0.0;
    std::vector<double> interference_scale(count, 1.0);
    for (std::size_t r = 0; r < count; ++r) {
      const Problem& p = problems[r];
      iterate[r] = allocate(p.sinr, p.weights, duals[r], z, p.min_term, cfg);
      const FeasibilityReport& f = iterate[r].feasibility;
      rec.mean_power += f.power_used * inv_count;
      rec.mean_eta += duals[r].eta * inv_count;
      rec.primal_ase += iterate[r].ase * inv_count;
      if (f.interference_used > p.weights.i_eff) {
        interference_scale[r] = p.weights.i_eff / f.interference_used;
      }
      scaled_power += interference_scale[r] * f.power_used * inv_count;

      double lagrangian = duals[r].eta * p.weights.i_eff;
      for (std::size_t k = 0; k < p.weights.w.size(); ++k) {
        const std::size_t n = static_cast<std::size_t>(iterate[r].assignment[k]);
        const double price = duals[r].mu + duals[r].eta * p.weights.w[k];
        lagrangian += iterate[r].rates(n, k) - price * iterate[r].power(n, k);
      }
      rec.dual_value += lagrangian * inv_count;
    }
    rec.dual_value += rec.mu * cfg.p_total;

    // Lower bound: shrink the iterate until both budgets hold.
    const double global_scale = scaled_power > cfg.p_total ? cfg.p_total / scaled_power : 1.0;
    for (std::size_t r = 0; r < count; ++r) {
      const double s = interference_scale[r] * global_scale;
      double rate = 0.0;
      for (std::size_t k = 0; k < problems[r].weights.w.size(); ++k) {
        const std::size_t n = static_cast<std::size_t>(iterate[r].assignment[k]);
        rate += std::log2(1.0 + (iterate[r].constellation(n, k) - 1.0) * s);
      }
      rec.feasible_ase += rate * inv_count;
    }
    sol.trajectory.push_back(rec);
    sol.iterations = i;

    if (std::isfinite(previous_dual)) {
      const double change = std::abs(rec.dual_value - previous_dual) /
                            std::max(std::abs(rec.dual_value), std::numeric_limits<double>::min());
      calm = change < options.rel_tol ? calm + 1 : 0;
      if (calm >= options.patience) {
        sol.converged = true;
        break;
      }
    }
    previous_dual = rec.dual_value;

    // Shared mu sees the average power; each eta sees its own interference.
    const double step = duals.front().step1;
    const double mu_next = std::max(mu_floor, rec.mu - step * (cfg.p_total - rec.mean_power));
    for (std::size_t r = 0; r < count; ++r) {
      duals[r] = subgradient_update(duals[r], iterate[r], problems[r].weights, cfg);
      duals[r].mu = mu_next;
    }
  }

  // Exact multipliers for the fixed assignment, feasible side of each bracket.
  std::vector<double> etas(count);
  for (std::size_t r = 0; r < count; ++r) etas[r] = duals[r].eta;
  double mu_star = 0.0;
  try {
    mu_star = polish_mu(problems, cfg.p_total, duals.front().mu, mu_floor, etas);
  } catch (const ContractError& e) {
    throw SolverError(fmt::format("dual refinement failed: {}", e.what()), sol.trajectory);
  }
  average_power(problems, mu_star, etas);

  sol.mu = mu_star;
  sol.results.reserve(count);
  sol.weights.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    DualState d = duals[r];
    d.mu = mu_star;
    d.eta = etas[r];
    const Problem& p = problems[r];
    AllocationResult res = allocate(p.sinr, p.weights, d, z, p.min_term, cfg);
    res.iterations = sol.iterations;
    if (res.feasibility.interference_used > p.weights.i_eff * (1.0 + kFeasibilityTol)) {
      throw SolverError(fmt::format("realization {} exceeds its interference budget", r),
                        sol.trajectory);
    }
    sol.average_power += res.feasibility.power_used * inv_count;
    sol.results.push_back(std::move(res));
    sol.weights.push_back(p.weights);
  }
  if (sol.average_power > cfg.p_total * (1.0 + kFeasibilityTol)) {
    throw SolverError("average power exceeds the budget after refinement", sol.trajectory);
  }
  return sol;
}

AllocationResult solve(const SystemConfig& cfg, const EstimationModel& est,
                       const ScenarioSpec& scenario, const ChannelRealization& real,
                       const SolverOptions& options) {
  EnsembleSolution sol =
      solve_ensemble(cfg, est, scenario, std::span<const ChannelRealization>(&real, 1), options);
  AllocationResult out = std::move(sol.results.front());
  out.trajectory = std::move(sol.trajectory);
  return out;
}

}  // namespace cogradio
