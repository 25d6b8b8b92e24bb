#pragma once

// Monte-Carlo harness: parameter sweeps over the solver and sampling checks
// of the analytic approximations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogradio/dist_approx.hpp"
#include "cogradio/solver.hpp"

namespace cogradio {

enum class SweepVariable { IThreshold, PTotal, Rho, Pr, Eps, BerTarget, KSubcarriers };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view text);

/// Estimation model implied by a scenario: perfect knowledge of a channel with
/// variance cross_variance, or an estimate of that variance with correlation rho.
EstimationModel estimation_for(const ScenarioSpec& scenario, const SystemConfig& cfg);

/// Copies of cfg and scenario with the swept variable set to value.
std::pair<SystemConfig, ScenarioSpec> apply_sweep_value(SweepVariable variable, double value,
                                                        const SystemConfig& cfg,
                                                        const ScenarioSpec& scenario);

struct SweepSpec {
  SweepVariable variable = SweepVariable::IThreshold;
  std::vector<double> grid;
  int trials = 500;
  ScenarioSpec scenario;
  SystemConfig base;
  SolverOptions solver;

  void validate() const;
};

struct SweepPoint {
  double value = 0.0;
  double ase_mean = 0.0;
  double ase_stderr = 0.0;
  double ase_quantized_mean = 0.0;
  double violation_rate = 0.0;
  double mean_iterations = 0.0;
  double kkt_residual = 0.0;  // largest relative KKT residual over the trials
  bool kkt_pass = false;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;

  bool all_ok() const;
};

/// One ensemble solve per grid value over `trials` realizations. Trial t uses
/// the stream mix_seed(base.rng_seed, t) at every grid value, so all points see
/// the same channel draws. Solver failures are recorded in the point status.
SweepResult run_sweep(const SweepSpec& spec);

/// value,ase_mean,ase_stderr,violation_rate,mean_iterations,status
std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_json(const SweepResult& result);

/// Fraction of realizations whose true-channel interference exceeds I_th.
double violation_rate(std::span<const AllocationResult> results,
                      std::span<const ChannelRealization> realizations, double i_threshold);

struct CdfPoint {
  double x = 0.0;
  double empirical = 0.0;
};

/// Sorted (gamma, F) steps of min(P_t/K, I_th/N) |H^ss|^2 / noise, with the
/// direct gain exponential of mean `direct_mean` and N the realized
/// sum_k |H^sp_k|^2 from sample_realization.
std::vector<CdfPoint> empirical_sinr_cdf(const SystemConfig& cfg, const EstimationModel& est,
                                         double direct_mean, int samples, std::uint64_t seed);

/// Analytic counterpart of empirical_sinr_cdf (Gaussian N in the sampler's
/// total-variance convention).
SinrDistParams sinr_params_for(const SystemConfig& cfg, const EstimationModel& est,
                               double direct_mean);

/// Kolmogorov distance between sorted samples and a cdf.
template <typename Cdf>
double sup_gap(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    gap = std::max({gap, std::abs(f - below), std::abs(f - above)});
  }
  return gap;
}

struct WeightLaw {
  enum class Kind { ChiSquare, Gamma, Equal };
  Kind kind = Kind::Gamma;
  double shape = 2.0;     // chi-square dof or gamma shape
  double scale = 0.5;     // gamma scale; unused otherwise
  double location = 4.0;  // added to every draw
  double delta2 = 0.5;    // posterior variance multiplying the draw
  double noncentrality = 0.0;  // of every |Xi_k|^2

  static WeightLaw chi_square() { return {Kind::ChiSquare, 2.0, 1.0, 2.0, 1.0, 0.0}; }
  static WeightLaw gamma() { return {Kind::Gamma, 2.0, 0.5, 4.0, 0.5, 0.0}; }
  static WeightLaw equal(double weight) { return {Kind::Equal, 0.0, 0.0, weight, 1.0, 0.0}; }

  std::string describe() const;
};

struct Fig2Result {
  std::vector<double> weights;
  ScaledChiSquare approx;
  std::vector<double> grid;       // evaluation points for tabulation
  std::vector<double> empirical;  // at grid
  std::vector<double> approximate;
  double sup_gap = 0.0;           // over every sample, not just the grid
  std::string law;
};

/// Draws the weights once, samples sum_k beta_k |Xi_k|^2 and compares its
/// empirical cdf against the moment-matched scaled chi-square.
Fig2Result fig2_validation(const WeightLaw& law, int k_subcarriers, int samples,
                           std::uint64_t seed, int table_points = 101);

struct AuditResult {
  double rate = 0.0;
  double std_error = 0.0;  // binomial standard error at the nominal eps
  double ase = 0.0;
  int trials = 0;
};

/// Solves `trials` probabilistic-scenario realizations and counts how often the
/// true-channel interference exceeds I_th.
AuditResult violation_audit(const SystemConfig& cfg, const EstimationModel& est,
                            const ScenarioSpec& scenario, int trials,
                            const SolverOptions& options = {});

}  // namespace cogradio
