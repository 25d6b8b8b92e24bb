// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cogradio/allocator.hpp"
#include "cogradio/dist_approx.hpp"
#include "cogradio/experiments.hpp"
#include "cogradio/solver.hpp"
#include "oracles.hpp"

using namespace cogradio;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> check;
};

std::string join(const std::vector<std::string>& parts, const char* sep = "; ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// ---------------------------------------------------------------- 1

Outcome fig2_criterion() {
  const std::uint64_t seed = mix_seed(1, 0xF162);  // the CLI default stream
  std::vector<std::string> parts;
  bool pass = true;
  for (const auto& [name, law] : {std::pair{"chi-square", WeightLaw::chi_square()},
                                  std::pair{"gamma", WeightLaw::gamma()}}) {
    const Fig2Result r = fig2_validation(law, 64, 100000, seed);
    pass = pass && r.sup_gap <= 0.02;
    double mean = 0.0;
    double square = 0.0;
    for (const double w : r.weights) {
      mean += w / r.weights.size();
      square += w * w / r.weights.size();
    }
    parts.push_back(fmt::format("{} gap {:.4f} (weight CV {:.2f})", name, r.sup_gap,
                                std::sqrt(square - mean * mean) / mean));
  }
  return {pass, join(parts) + " (limit 0.02)"};
}

// ---------------------------------------------------------------- 2

Outcome sinr_cdf_criterion() {
  SystemConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.p_total = 30.0;
  cfg.i_threshold = 10.0;
  cfg.noise_power = 0.5;  // unit total noise keeps the SINR axis O(1)
  cfg.primary_interference_power = 0.5;
  const EstimationModel est = EstimationModel::perfect(cfg.cross_variance);
  const auto table = empirical_sinr_cdf(cfg, est, 1.0, 100000, mix_seed(1, 0xCDF));
  const SinrDistParams p = sinr_params_for(cfg, est, 1.0);
  std::vector<double> sorted;
  for (const CdfPoint& c : table) sorted.push_back(c.x);
  const double gap =
      sup_gap(std::span<const double>(sorted), [&](double g) { return sinr_cdf(g, p); });

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> quantile(0.005, 0.995);
  const double h = 1e-4;
  double worst_rel = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double g = sorted[static_cast<std::size_t>(quantile(rng) * sorted.size())];
    const double fd = (sinr_cdf(g + h, p) - sinr_cdf(g - h, p)) / (2.0 * h);
    worst_rel = std::max(worst_rel, std::abs(sinr_pdf(g, p) - fd) / fd);
  }
  return {gap <= 0.03 && worst_rel <= 1e-4,
          fmt::format("cdf gap {:.4f} (limit 0.03); pdf vs finite difference worst rel {:.2e} "
                      "(limit 1e-4)",
                      gap, worst_rel)};
}

// ---------------------------------------------------------------- 3

Outcome cap_criterion() {
  std::vector<std::string> parts;
  bool pass = true;
  const double i_th = 10.0;
  const int draws = 100000;
  for (const int k : {8, 64}) {
    for (const double eps : {0.05, 0.2}) {
      std::mt19937_64 rng(mix_seed(3, static_cast<std::uint64_t>(k * 1000 + eps * 100)));
      std::uniform_real_distribution<double> mu_draw(0.0, 3.0);
      std::uniform_real_distribution<double> power_draw(0.5, 1.5);
      std::vector<double> mu(static_cast<std::size_t>(k));
      std::vector<double> power(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        mu[j] = mu_draw(rng);
        power[j] = power_draw(rng);
      }
      const double rate = oracle::collision_frequency(mu, power, 1.0, deterministic_cap(i_th, eps, k),
                                                      i_th, draws, rng);
      const double bound = eps + 3.0 * std::sqrt(eps * (1.0 - eps) / draws);
      pass = pass && rate <= bound;
      parts.push_back(fmt::format("K={} eps={}: {:.4f} <= {:.4f}", k, eps, rate, bound));
    }
  }
  // end to end: solver allocations audited against the true cross channels
  for (const auto& [k, eps] : {std::pair{64, 0.05}, std::pair{8, 0.2}}) {
    SystemConfig cfg;
    cfg.n_subcarriers = k;
    cfg.i_threshold = 1.0;
    cfg.cross_mean = {0.0, 0.0};
    const ScenarioSpec spec = ScenarioSpec::probabilistic(0.5, eps);
    const AuditResult a = violation_audit(cfg, estimation_for(spec, cfg), spec, 2000);
    const double bound = eps + 3.0 * a.std_error;
    pass = pass && a.rate <= bound;
    parts.push_back(fmt::format("audit K={} eps={}: {:.4f} <= {:.4f}", k, eps, a.rate, bound));
  }
  return {pass, join(parts)};
}

// ---------------------------------------------------------------- 4

Outcome convergence_criterion() {
  SystemConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.p_total = 30.0;
  cfg.i_threshold = 10.0;
  cfg.ber_target = 1e-2;
  const EstimationModel est = EstimationModel::perfect(cfg.cross_variance);
  const Grid<double> means = draw_direct_means(cfg);
  int hits = 0;
  int raw_hits = 0;
  double worst_ratio = 1.0;
  for (int s = 0; s < 50; ++s) {
    Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(s)));
    const ChannelRealization real = sample_realization(cfg, est, means, rng);
    const AllocationResult r = solve(cfg, est, ScenarioSpec::perfect(), real);
    double best = 0.0;
    bool raw = false;
    for (std::size_t i = 0; i < std::min<std::size_t>(12, r.trajectory.size()); ++i) {
      best = std::max(best, r.trajectory[i].feasible_ase);
      raw = raw || r.trajectory[i].primal_ase >= 0.965 * r.ase;
    }
    worst_ratio = std::min(worst_ratio, best / r.ase);
    hits += best >= 0.965 * r.ase;
    raw_hits += raw;
  }
  return {hits >= 40,
          fmt::format("{}/50 realizations reach 96.5% with a feasible iterate within 12 "
                      "iterations (need 40), worst ratio {:.4f}; raw iterate {}/50",
                      hits, worst_ratio, raw_hits)};
}

// ---------------------------------------------------------------- 5

Outcome brute_force_criterion() {
  const double support[3] = {0.5, 3.0, 12.0};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> cross_draw(0.1, 3.0);
  std::uniform_real_distribution<double> budget(0.1, 2.0);
  int good = 0;
  double worst = 0.0;
  const int instances = 40;
  for (int i = 0; i < instances; ++i) {
    SystemConfig cfg;
    cfg.n_users = 2;
    cfg.n_subcarriers = 2;
    cfg.p_total = 1.0;
    cfg.ber_target = i % 2 ? 1e-2 : 1e-3;
    cfg.i_threshold = budget(rng);
    Grid<double> sinr(2, 2);
    for (double& v : sinr.values()) v = support[pick(rng)];
    const std::vector<double> cross{cross_draw(rng), cross_draw(rng)};
    const AllocationResult r = solve(cfg, EstimationModel::perfect(0.1), ScenarioSpec::perfect(),
                                     oracle::manual_realization(sinr, cross));
    const double best = oracle::brute_force_ase(sinr, cross, cfg, 1e-3);
    const double rel = std::abs(r.ase - best) / best;
    worst = std::max(worst, rel);
    good += rel <= 0.01;
  }
  return {good == instances,
          fmt::format("{}/{} instances within 1% of exhaustive search, worst {:.2e}", good,
                      instances, worst)};
}

// ---------------------------------------------------------------- 6

Outcome kkt_criterion() {
  const ScenarioSpec specs[] = {ScenarioSpec::perfect(), ScenarioSpec::average(0.4),
                                ScenarioSpec::worst(0.4, 0.8),
                                ScenarioSpec::probabilistic(0.4, 0.05)};
  int solved = 0;
  int passed = 0;
  double worst_residual = 0.0;
  double worst_violation = 0.0;
  auto audit = [&](const AllocationResult& r, const ScenarioWeights& w, const SystemConfig& cfg,
                   std::optional<double> average_power) {
    const KktReport k = verify_kkt(r, r.duals, w, cfg, 1e-3, average_power);
    ++solved;
    const double violation = std::max(
        {k.primal_violation,
         (r.feasibility.interference_used - w.i_eff) / w.i_eff, 0.0});
    passed += k.pass && violation <= 1e-6;
    worst_residual = std::max({worst_residual, k.power_complementarity,
                               k.interference_complementarity, k.stationarity, k.assignment_gap});
    worst_violation = std::max(worst_violation, violation);
  };
  for (const ScenarioSpec& spec : specs) {
    for (const double i_th : {0.5, 5.0, 50.0}) {
      for (const double p_total : {10.0, 30.0}) {
        SystemConfig cfg;
        cfg.i_threshold = i_th;
        cfg.p_total = p_total;
        const EstimationModel est = estimation_for(spec, cfg);
        const Grid<double> means = draw_direct_means(cfg);
        std::vector<ChannelRealization> reals;
        for (int s = 0; s < 20; ++s) {
          Rng rng(mix_seed(6, static_cast<std::uint64_t>(s)));
          reals.push_back(sample_realization(cfg, est, means, rng));
        }
        for (int s = 0; s < 5; ++s) {
          const AllocationResult r = solve(cfg, est, spec, reals[s]);
          audit(r, scenario_weights(spec, reals[s], est, cfg), cfg, std::nullopt);
        }
        const EnsembleSolution sol = solve_ensemble(cfg, est, spec, reals);
        for (std::size_t r = 0; r < sol.results.size(); ++r) {
          audit(sol.results[r], sol.weights[r], cfg, sol.average_power);
        }
      }
    }
  }
  return {passed == solved,
          fmt::format("{}/{} solved instances pass (KKT tol 1e-3, violation <= 1e-6); worst "
                      "residual {:.2e}, worst violation {:.2e}",
                      passed, solved, worst_residual, worst_violation)};
}

// ---------------------------------------------------------------- 7

constexpr int kTrendTrials = 500;

SweepResult sweep(SweepVariable variable, std::vector<double> grid, const ScenarioSpec& scenario,
                  const SystemConfig& base) {
  SweepSpec spec;
  spec.variable = variable;
  spec.grid = std::move(grid);
  spec.trials = kTrendTrials;
  spec.scenario = scenario;
  spec.base = base;
  return run_sweep(spec);
}

// f[i+1] >= f[i] - tolerance (sign +1) or f[i+1] <= f[i] + tolerance (sign -1),
// tolerance the larger stderr of the pair. Returns the failing grid values.
std::vector<double> monotone_breaks(const SweepResult& r, int sign) {
  std::vector<double> breaks;
  for (std::size_t i = 0; i + 1 < r.points.size(); ++i) {
    const SweepPoint& a = r.points[i];
    const SweepPoint& b = r.points[i + 1];
    const double tol = std::max(a.ase_stderr, b.ase_stderr);
    if (!a.ok() || !b.ok() || sign * (b.ase_mean - a.ase_mean) < -tol) breaks.push_back(b.value);
  }
  return breaks;
}

std::string values(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (const double x : v) s.push_back(fmt::format("{:g}", x));
  return "{" + join(s, ",") + "}";
}

const std::vector<double> kIthGrid{0.5, 1.0, 2.5, 5.0, 10.0, 25.0, 50.0, 100.0};
const std::vector<double> kRhoGrid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

SystemConfig fig45_config(double ber) {
  SystemConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.p_total = 30.0;
  cfg.ber_target = ber;
  return cfg;
}

SystemConfig imperfect_config(double p_total, double i_th, double ber, double estimate_variance) {
  SystemConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.p_total = p_total;
  cfg.i_threshold = i_th;
  cfg.ber_target = ber;
  cfg.cross_mean = {0.0, 0.0};
  cfg.cross_variance = estimate_variance;
  return cfg;
}

Outcome trend_ith() {
  const SweepResult r =
      sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::perfect(), fig45_config(1e-2));
  const auto breaks = monotone_breaks(r, +1);
  const double top = r.points.back().ase_mean;
  const double last_gain = (top - r.points[r.points.size() - 2].ase_mean) / top;
  const double total_gain = (top - r.points.front().ase_mean) / top;
  // plateau: the last doubling of I_th adds under 1% of the ASE
  const bool plateau = last_gain <= 0.01;
  return {breaks.empty() && plateau,
          fmt::format("ASE {:.1f} -> {:.1f} over I_th {}..{}; breaks {}; last doubling adds "
                      "{:.3f}% (total rise {:.1f}%)",
                      r.points.front().ase_mean, top, kIthGrid.front(), kIthGrid.back(),
                      values(breaks), 100.0 * last_gain, 100.0 * total_gain)};
}

Outcome trend_ber() {
  const SweepResult hi =
      sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::perfect(), fig45_config(1e-2));
  const SweepResult lo =
      sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::perfect(), fig45_config(1e-3));
  std::vector<double> breaks;
  double min_gain = 1e300;
  double max_gain = 0.0;
  for (std::size_t i = 0; i < kIthGrid.size(); ++i) {
    const double diff = hi.points[i].ase_mean - lo.points[i].ase_mean;
    if (!(diff > 0.0)) breaks.push_back(kIthGrid[i]);
    const double gain = diff / lo.points[i].ase_mean;
    min_gain = std::min(min_gain, gain);
    max_gain = std::max(max_gain, gain);
  }
  return {breaks.empty(),
          fmt::format("ASE(1e-2) > ASE(1e-3) at {}/{} I_th values; gain {:.1f}%..{:.1f}%",
                      kIthGrid.size() - breaks.size(), kIthGrid.size(), 100.0 * min_gain,
                      100.0 * max_gain)};
}

Outcome trend_rho_average() {
  std::vector<std::string> parts;
  bool pass = true;
  for (const double p_total : {20.0, 30.0, 40.0}) {
    const SweepResult r = sweep(SweepVariable::Rho, kRhoGrid, ScenarioSpec::average(0.0),
                                imperfect_config(p_total, 25.0, 1e-2, 1.0));
    const auto breaks = monotone_breaks(r, -1);
    pass = pass && breaks.empty();
    parts.push_back(fmt::format("P_t={}: {:.1f} -> {:.1f}, breaks {}", p_total,
                                r.points.front().ase_mean, r.points.back().ase_mean, values(breaks)));
  }
  return {pass, join(parts)};
}

Outcome trend_rho_worst() {
  std::vector<std::string> parts;
  bool pass = true;
  std::vector<SweepResult> by_pr;
  for (const double pr : {0.1, 0.5, 0.9}) {
    by_pr.push_back(sweep(SweepVariable::Rho, kRhoGrid, ScenarioSpec::worst(0.0, pr),
                          imperfect_config(20.0, 5.0, 1e-3, 1.0)));
    const SweepResult& r = by_pr.back();
    const auto breaks = monotone_breaks(r, -1);
    pass = pass && breaks.empty();
    const auto lowest = std::min_element(r.points.begin(), r.points.end(),
                                         [](const auto& a, const auto& b) { return a.ase_mean < b.ase_mean; });
    parts.push_back(fmt::format("pr={}: {:.1f} -> min {:.1f} at rho {} -> {:.1f}, breaks {}", pr,
                                r.points.front().ase_mean, lowest->ase_mean, lowest->value,
                                r.points.back().ase_mean, values(breaks)));
  }
  // companion trend, reported only: ASE nonincreasing in pr at each rho
  int pr_ok = 0;
  for (std::size_t i = 0; i < kRhoGrid.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j + 1 < by_pr.size(); ++j) {
      const SweepPoint& a = by_pr[j].points[i];
      const SweepPoint& b = by_pr[j + 1].points[i];
      ok = ok && b.ase_mean <= a.ase_mean + std::max(a.ase_stderr, b.ase_stderr);
    }
    pr_ok += ok;
  }
  parts.push_back(fmt::format("ASE nonincreasing in pr at {}/{} rho values", pr_ok, kRhoGrid.size()));
  return {pass, join(parts)};
}

Outcome trend_eps() {
  const std::vector<double> eps_grid{0.01, 0.05, 0.1, 0.2, 0.3, 0.5};
  std::vector<std::string> parts;
  bool pass = true;
  for (const double i_th : {1.0, 5.0, 10.0}) {
    const SweepResult r = sweep(SweepVariable::Eps, eps_grid, ScenarioSpec::probabilistic(0.5, 0.05),
                                imperfect_config(40.0, i_th, 1e-3, 1.0));
    const auto breaks = monotone_breaks(r, +1);
    pass = pass && breaks.empty();
    parts.push_back(fmt::format("I_th={}: {:.1f} -> {:.1f}, breaks {}", i_th,
                                r.points.front().ase_mean, r.points.back().ase_mean, values(breaks)));
  }
  return {pass, join(parts)};
}

Outcome trend_scenarios() {
  const SystemConfig cfg = imperfect_config(45.0, 1.0, 1e-2, 0.1);
  const SweepResult avg = sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::average(0.2), cfg);
  const SweepResult prob =
      sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::probabilistic(0.2, 0.05), cfg);
  const SweepResult worst = sweep(SweepVariable::IThreshold, kIthGrid, ScenarioSpec::worst(0.2, 0.95), cfg);
  std::vector<double> breaks;
  for (std::size_t i = 0; i < kIthGrid.size(); ++i) {
    if (kIthGrid[i] > 10.0) continue;  // low-to-mid region
    const SweepPoint& a = avg.points[i];
    const SweepPoint& p = prob.points[i];
    const SweepPoint& w = worst.points[i];
    const bool ordered = a.ase_mean >= p.ase_mean - std::max(a.ase_stderr, p.ase_stderr) &&
                         p.ase_mean >= w.ase_mean - std::max(p.ase_stderr, w.ase_stderr);
    if (!ordered) breaks.push_back(kIthGrid[i]);
  }
  auto spread = [&](std::size_t i) {
    const double hi = std::max({avg.points[i].ase_mean, prob.points[i].ase_mean, worst.points[i].ase_mean});
    const double lo = std::min({avg.points[i].ase_mean, prob.points[i].ase_mean, worst.points[i].ase_mean});
    return (hi - lo) / hi;
  };
  const double top_spread = spread(kIthGrid.size() - 1);
  const double low_spread = spread(0);
  // convergence: within 1% of each other at the largest I_th
  const bool converged = top_spread <= 0.01;
  std::vector<std::string> table;
  for (std::size_t i = 0; i < kIthGrid.size(); ++i) {
    table.push_back(fmt::format("{:g}:{:.0f}/{:.0f}/{:.0f}", kIthGrid[i], avg.points[i].ase_mean,
                                prob.points[i].ase_mean, worst.points[i].ase_mean));
  }
  return {breaks.empty() && converged,
          fmt::format("avg/prob/worst by I_th [{}]; order breaks {}; spread {:.2f}% at I_th={:g} "
                      "vs {:.2f}% at I_th={:g}",
                      join(table, " "), values(breaks), 100.0 * top_spread, kIthGrid.back(),
                      100.0 * low_spread, kIthGrid.front())};
}

// ---------------------------------------------------------------- 8

Outcome pinned_criterion() {
  const double z2 = zeta(1e-2);
  const double z3 = zeta(1e-3);
  const double cap = deterministic_cap(1.0, 0.19, 2);
  const std::vector<double> equal(64, 0.731);
  const std::vector<double> zeros(64, 0.0);
  const double scale_error = std::abs(prop3_approx(equal, zeros).scale - 0.731);
  const bool pass = std::abs(z2 - 0.44102) <= 1e-5 && std::abs(z3 - 0.26298) <= 1e-5 &&
                    std::abs(cap - 0.6141) <= 1e-4 && scale_error == 0.0;
  return {pass, fmt::format("zeta(1e-2)={:.6f} zeta(1e-3)={:.6f} cap(2,0.19,1)={:.6f} "
                            "equal-weight scale error {:g}",
                            z2, z3, cap, scale_error)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1", "weighted chi-square sum approximation", fig2_criterion},
      {"2", "SINR cdf and pdf", sinr_cdf_criterion},
      {"3", "deterministic cap soundness", cap_criterion},
      {"4", "subgradient convergence", convergence_criterion},
      {"5", "brute-force equivalence", brute_force_criterion},
      {"6", "KKT and feasibility", kkt_criterion},
      {"7a", "ASE nondecreasing in I_th with plateau", trend_ith},
      {"7b", "ASE(1e-2) > ASE(1e-3)", trend_ber},
      {"7c-average", "ASE nonincreasing in rho, average case", trend_rho_average},
      {"7c-worst", "ASE nonincreasing in rho, worst case", trend_rho_worst},
      {"7d", "ASE nondecreasing in eps", trend_eps},
      {"7e", "average >= probabilistic >= worst, converging", trend_scenarios},
      {"8", "pinned analytic values", pinned_criterion},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    fmt::print("{} [{}] {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds,
               o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
