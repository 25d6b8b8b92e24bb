#include "cogradio/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "cogradio/error.hpp"

namespace cogradio {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kKktTolerance = 1e-3;

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

Json config_json(const SystemConfig& cfg) {
  Json j;
  j["n_users"] = cfg.n_users;
  j["n_subcarriers"] = cfg.n_subcarriers;
  j["p_total"] = cfg.p_total;
  j["i_threshold"] = cfg.i_threshold;
  j["ber_target"] = cfg.ber_target;
  j["noise_power"] = cfg.noise_power;
  j["primary_interference_power"] = cfg.primary_interference_power;
  j["direct_mean_min"] = cfg.direct_mean_range.first;
  j["direct_mean_max"] = cfg.direct_mean_range.second;
  j["cross_mean_re"] = cfg.cross_mean.real();
  j["cross_mean_im"] = cfg.cross_mean.imag();
  j["cross_variance"] = cfg.cross_variance;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

Json scenario_json(const ScenarioSpec& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["rho"] = s.rho;
  j["pr"] = s.pr ? Json(*s.pr) : Json(nullptr);
  j["eps"] = s.eps ? Json(*s.eps) : Json(nullptr);
  return j;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::IThreshold: return "i_th";
    case SweepVariable::PTotal: return "p_total";
    case SweepVariable::Rho: return "rho";
    case SweepVariable::Pr: return "pr";
    case SweepVariable::Eps: return "eps";
    case SweepVariable::BerTarget: return "ber_target";
    case SweepVariable::KSubcarriers: return "k_subcarriers";
  }
  return "unknown";
}

SweepVariable parse_sweep_variable(std::string_view text) {
  for (const SweepVariable v :
       {SweepVariable::IThreshold, SweepVariable::PTotal, SweepVariable::Rho, SweepVariable::Pr,
        SweepVariable::Eps, SweepVariable::BerTarget, SweepVariable::KSubcarriers}) {
    if (text == to_string(v)) return v;
  }
  throw ParameterError(fmt::format("unknown sweep variable '{}'", text));
}

EstimationModel estimation_for(const ScenarioSpec& scenario, const SystemConfig& cfg) {
  if (!scenario.imperfect_csi()) return EstimationModel::perfect(cfg.cross_variance);
  return EstimationModel::from_correlation(scenario.rho, cfg.cross_variance);
}

std::pair<SystemConfig, ScenarioSpec> apply_sweep_value(SweepVariable variable, double value,
                                                        const SystemConfig& cfg,
                                                        const ScenarioSpec& scenario) {
  SystemConfig c = cfg;
  ScenarioSpec s = scenario;
  switch (variable) {
    case SweepVariable::IThreshold: c.i_threshold = value; break;
    case SweepVariable::PTotal: c.p_total = value; break;
    case SweepVariable::Rho: s.rho = value; break;
    case SweepVariable::Pr: s.pr = value; break;
    case SweepVariable::Eps: s.eps = value; break;
    case SweepVariable::BerTarget: c.ber_target = value; break;
    case SweepVariable::KSubcarriers:
      if (value != std::floor(value) || !(value >= 1.0)) {
        throw ParameterError(fmt::format("k_subcarriers must be a positive integer, got {}", value));
      }
      c.n_subcarriers = static_cast<int>(value);
      break;
  }
  return {c, s};
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  if (trials < 1) throw ParameterError(fmt::format("sweep trials must be >= 1, got {}", trials));
  for (const double v : grid) {
    if (!std::isfinite(v)) throw ParameterError("sweep grid values must be finite");
  }
  base.validate();
}

bool SweepResult::all_ok() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.ok(); });
}

double violation_rate(std::span<const AllocationResult> results,
                      std::span<const ChannelRealization> realizations, double i_threshold) {
  if (results.size() != realizations.size() || results.empty()) {
    throw ParameterError("violation_rate: results and realizations must pair up");
  }
  std::size_t violations = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    double interference = 0.0;
    const AllocationResult& res = results[r];
    for (std::size_t k = 0; k < res.assignment.size(); ++k) {
      const auto n = static_cast<std::size_t>(res.assignment[k]);
      interference += res.power(n, k) * std::norm(realizations[r].cross_gains[k]);
    }
    if (interference > i_threshold) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(results.size());
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  out.spec = spec;
  for (const double value : spec.grid) {
    SweepPoint pt;
    pt.value = value;
    try {
      const auto [cfg, scenario] = apply_sweep_value(spec.variable, value, spec.base, spec.scenario);
      cfg.validate();
      scenario.validate();
      const EstimationModel est = estimation_for(scenario, cfg);
      const Grid<double> means = draw_direct_means(cfg);
      std::vector<ChannelRealization> reals;
      reals.reserve(static_cast<std::size_t>(spec.trials));
      for (int t = 0; t < spec.trials; ++t) {
        Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(t)));
        reals.push_back(sample_realization(cfg, est, means, rng));
      }
      const EnsembleSolution sol = solve_ensemble(cfg, est, scenario, reals, spec.solver);

      const double n = static_cast<double>(spec.trials);
      pt.ase_mean = sol.ase(RateMode::Continuous);
      pt.ase_quantized_mean = sol.ase(RateMode::Quantized);
      double sq = 0.0;
      for (const AllocationResult& r : sol.results) sq += (r.ase - pt.ase_mean) * (r.ase - pt.ase_mean);
      pt.ase_stderr = spec.trials > 1 ? std::sqrt(sq / (n - 1.0) / n) : 0.0;
      pt.violation_rate = violation_rate(sol.results, reals, cfg.i_threshold);
      pt.mean_iterations = sol.iterations;

      pt.kkt_pass = true;
      for (std::size_t r = 0; r < sol.results.size(); ++r) {
        const KktReport rep = verify_kkt(sol.results[r], sol.results[r].duals, sol.weights[r], cfg,
                                         kKktTolerance, sol.average_power);
        pt.kkt_residual = std::max({pt.kkt_residual, rep.power_complementarity,
                                    rep.interference_complementarity, rep.stationarity,
                                    rep.assignment_gap, rep.primal_violation});
        pt.kkt_pass = pt.kkt_pass && rep.pass;
      }
    } catch (const SolverError& e) {
      pt.status = sanitize(fmt::format("solver error: {}", e.what()));
    } catch (const std::invalid_argument& e) {
      pt.status = sanitize(fmt::format("invalid point: {}", e.what()));
    } catch (const std::domain_error& e) {
      pt.status = sanitize(fmt::format("domain error: {}", e.what()));
    } catch (const std::logic_error& e) {
      pt.status = sanitize(fmt::format("contract error: {}", e.what()));
    }
    if (!pt.ok()) {
      pt.ase_mean = pt.ase_stderr = pt.ase_quantized_mean = pt.violation_rate = nan();
      pt.mean_iterations = pt.kkt_residual = nan();
    }
    out.points.push_back(pt);
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "value,ase_mean,ase_stderr,violation_rate,mean_iterations,status\n";
  for (const SweepPoint& p : result.points) {
    out += fmt::format("{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n", p.value, p.ase_mean,
                       p.ase_stderr, p.violation_rate, p.mean_iterations, p.status);
  }
  return out;
}

std::string sweep_to_json(const SweepResult& result) {
  Json j;
  const SweepSpec& s = result.spec;
  Json meta;
  meta["variable"] = std::string(to_string(s.variable));
  meta["grid"] = s.grid;
  meta["trials"] = s.trials;
  meta["seed"] = s.base.rng_seed;
  meta["trial_seed_rule"] = "mix_seed(seed, trial) shared by every grid point";
  meta["scenario"] = scenario_json(s.scenario);
  meta["config"] = config_json(s.base);
  meta["solver"] = {{"max_iter", s.solver.max_iter},
                    {"rel_tol", s.solver.rel_tol},
                    {"patience", s.solver.patience}};
  j["metadata"] = meta;
  Json pts = Json::array();
  for (const SweepPoint& p : result.points) {
    Json q;
    q["value"] = p.value;
    q["ase_mean"] = p.ase_mean;
    q["ase_stderr"] = p.ase_stderr;
    q["ase_quantized_mean"] = p.ase_quantized_mean;
    q["violation_rate"] = p.violation_rate;
    q["mean_iterations"] = p.mean_iterations;
    q["kkt_pass"] = p.kkt_pass;
    q["kkt_residual"] = p.kkt_residual;
    q["status"] = p.status;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j.dump(2) + "\n";
}

SinrDistParams sinr_params_for(const SystemConfig& cfg, const EstimationModel& est,
                               double direct_mean) {
  const double rho2 = est.correlation * est.correlation;
  const Complex mean = cfg.cross_mean * (1.0 + rho2);
  const double variance = (1.0 + rho2) * (1.0 + rho2) * est.estimate_variance +
                          (1.0 - rho2) * est.error_variance;
  const std::vector<Complex> means(static_cast<std::size_t>(cfg.n_subcarriers), mean);
  SinrDistParams p;
  p.direct_mean = direct_mean;
  p.total_noise = cfg.total_noise();
  p.p_total = cfg.p_total;
  p.i_threshold = cfg.i_threshold;
  p.k_subcarriers = cfg.n_subcarriers;
  p.nsp = lemma1_gaussian(means, variance, VarianceConvention::Total);
  return p;
}

std::vector<CdfPoint> empirical_sinr_cdf(const SystemConfig& cfg, const EstimationModel& est,
                                         double direct_mean, int samples, std::uint64_t seed) {
  if (samples < 1000) {
    throw ParameterError(fmt::format("empirical_sinr_cdf: needs >= 1000 samples, got {}", samples));
  }
  if (!(direct_mean > 0.0)) throw ParameterError("empirical_sinr_cdf: direct_mean must be positive");
  SystemConfig one = cfg;
  one.n_users = 1;
  const Grid<double> means(1, static_cast<std::size_t>(cfg.n_subcarriers), direct_mean);
  Rng rng(seed);
  std::vector<double> gammas;
  gammas.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const ChannelRealization real = sample_realization(one, est, means, rng);
    double nsp = 0.0;
    for (const Complex& h : real.cross_gains) nsp += std::norm(h);
    const double power = std::min(cfg.nominal_power(), cfg.i_threshold / nsp);
    gammas.push_back(power * real.direct_power_gains(0, 0) / cfg.total_noise());
  }
  std::sort(gammas.begin(), gammas.end());
  std::vector<CdfPoint> table(gammas.size());
  const double n = static_cast<double>(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    table[i] = {gammas[i], static_cast<double>(i + 1) / n};
  }
  return table;
}

std::string WeightLaw::describe() const {
  switch (kind) {
    case Kind::ChiSquare:
      return fmt::format("beta = {} * (chi-square(dof {}) + {}), Xi noncentrality {}", delta2,
                         shape, location, noncentrality);
    case Kind::Gamma:
      return fmt::format("beta = {} * (gamma(shape {}, scale {}) + {}), Xi noncentrality {}",
                         delta2, shape, scale, location, noncentrality);
    case Kind::Equal:
      return fmt::format("beta = {} * {} for every subcarrier, Xi noncentrality {}", delta2,
                         location, noncentrality);
  }
  return "unknown";
}

Fig2Result fig2_validation(const WeightLaw& law, int k_subcarriers, int samples,
                           std::uint64_t seed, int table_points) {
  if (k_subcarriers < 1 || samples < 1 || table_points < 2) {
    throw ParameterError("fig2_validation: K, samples and table_points must be positive");
  }
  if (!(law.delta2 > 0.0) || !(law.noncentrality >= 0.0)) {
    throw ParameterError("fig2_validation: delta2 must be positive, noncentrality nonnegative");
  }
  const auto k = static_cast<std::size_t>(k_subcarriers);
  Rng rng(seed);
  Fig2Result out;
  out.law = law.describe();
  out.weights.resize(k);
  if (law.kind == WeightLaw::Kind::ChiSquare) {
    std::chi_squared_distribution<double> draw(law.shape);
    for (double& b : out.weights) b = law.delta2 * (draw(rng) + law.location);
  } else if (law.kind == WeightLaw::Kind::Gamma) {
    std::gamma_distribution<double> draw(law.shape, law.scale);
    for (double& b : out.weights) b = law.delta2 * (draw(rng) + law.location);
  } else {
    for (double& b : out.weights) b = law.delta2 * law.location;
  }
  const std::vector<double> means(k, law.noncentrality);
  out.approx = prop3_approx(out.weights, means);

  // |Xi|^2 = (z1 + sqrt(mu))^2 + z2^2 with unit-variance components
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = std::sqrt(law.noncentrality);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  for (double& x : draws) {
    double sum = 0.0;
    for (const double b : out.weights) {
      const double re = normal(rng) + shift;
      const double im = normal(rng);
      sum += b * (re * re + im * im);
    }
    x = sum;
  }
  std::sort(draws.begin(), draws.end());
  const auto approx_cdf = [&](double x) { return scaled_chi_square_cdf(x, out.approx); };
  out.sup_gap = sup_gap(std::span<const double>(draws), approx_cdf);

  const double lo = draws[draws.size() / 1000];
  const double hi = draws[draws.size() - 1 - draws.size() / 1000];
  const double n = static_cast<double>(draws.size());
  for (int i = 0; i < table_points; ++i) {
    const double x = lo + (hi - lo) * i / (table_points - 1);
    const auto above = std::upper_bound(draws.begin(), draws.end(), x);
    out.grid.push_back(x);
    out.empirical.push_back(static_cast<double>(above - draws.begin()) / n);
    out.approximate.push_back(approx_cdf(x));
  }
  return out;
}

AuditResult violation_audit(const SystemConfig& cfg, const EstimationModel& est,
                            const ScenarioSpec& scenario, int trials,
                            const SolverOptions& options) {
  if (scenario.kind != ScenarioKind::Probabilistic) {
    throw ParameterError("violation_audit needs the probabilistic scenario");
  }
  if (trials < 1) throw ParameterError("violation_audit: trials must be >= 1");
  scenario.validate();
  const Grid<double> means = draw_direct_means(cfg);
  AuditResult out;
  out.trials = trials;
  std::size_t violations = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(t)));
    const ChannelRealization real = sample_realization(cfg, est, means, rng);
    const AllocationResult res = solve(cfg, est, scenario, real, options);
    const double rate = violation_rate(std::span<const AllocationResult>(&res, 1),
                                       std::span<const ChannelRealization>(&real, 1),
                                       cfg.i_threshold);
    if (rate > 0.0) ++violations;
    out.ase += res.ase / trials;
  }
  const double eps = *scenario.eps;
  out.rate = static_cast<double>(violations) / trials;
  out.std_error = std::sqrt(eps * (1.0 - eps) / trials);
  return out;
}

}  // namespace cogradio
