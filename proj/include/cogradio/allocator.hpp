#pragma once

// Per-realization building blocks of the dual-decomposition allocator:
// constellation mapping, multi-level water-filling, subcarrier assignment,
// subgradient multiplier updates and a KKT audit of a finished allocation.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cogradio/core_model.hpp"
#include "cogradio/grid.hpp"
#include "cogradio/scenario.hpp"

namespace cogradio {

/// SINR-to-constellation constant -1.5 / ln(ber_target / 0.3).
double zeta(double ber_target);

/// Interference side of one realization under one scenario.
struct ScenarioWeights {
  std::vector<double> w;  // per-subcarrier weight multiplying eta
  double nsp_value = 0.0; // realized or effective aggregate cross gain
  double i_eff = 0.0;     // interference budget (I_th or the collision-probability cap)

  /// min(P_t/K, i_eff/nsp_value): the realization-level power normalization.
  double min_term(const SystemConfig& cfg) const;
};

ScenarioWeights scenario_weights(const ScenarioSpec& scenario, const ChannelRealization& real,
                                 const EstimationModel& est, const SystemConfig& cfg);

struct DualState {
  std::vector<double> lambda;  // per subcarrier, midway between the two best metrics
  double mu = 0.0;             // total power multiplier
  double eta = 0.0;            // interference multiplier
  double step1 = 0.0;          // current step for mu
  double step2 = 0.0;          // current step for eta
  int iteration = 1;
};

/// mu = K/(P_t ln2), eta = K/(i_eff ln2), steps 0.1 * multiplier / budget.
DualState initial_duals(const SystemConfig& cfg, const ScenarioWeights& weights);

/// [1/(ln2 (mu + eta w)) - min_term/(zeta sinr)]^+
double water_fill(double sinr, double w, const DualState& duals, double zeta, double min_term);

/// x/(ln2 (1+x)) + log2(1+x) with x = zeta sinr p / min_term.
double subcarrier_metric(double sinr, double p_star, double zeta, double min_term);

/// Per subcarrier the user with the largest metric (0-based, ties to the lowest index).
std::vector<int> assign_subcarriers(const Grid<double>& metrics);

/// max(1, zeta sinr / (ln2 min_term (mu + eta w)))
double constellation(double sinr, const DualState& duals, double w, double zeta, double min_term);

/// Largest rate in {2,4,6,8,10} bits with 2^rate <= m_star, or 0.
int quantize_rate(double m_star);

struct FeasibilityReport {
  double power_used = 0.0;
  double power_budget = 0.0;
  double interference_used = 0.0;  // sum_k w_k sum_n phi P
  double interference_budget = 0.0;

  double power_slack() const { return power_budget - power_used; }
  double interference_slack() const { return interference_budget - interference_used; }
};

struct IterationRecord {
  int iteration = 0;
  double mu = 0.0;
  double mean_eta = 0.0;
  double primal_ase = 0.0;    // ASE of the raw iterate
  double feasible_ase = 0.0;  // ASE after scaling the iterate into the feasible set
  double dual_value = 0.0;
  double mean_power = 0.0;
};

struct AllocationResult {
  Grid<std::uint8_t> phi;
  Grid<double> power;
  Grid<double> constellation;
  Grid<double> rates;            // log2 M, continuous
  Grid<double> quantized_rates;  // from quantize_rate
  Grid<double> cutoff;           // SINR below which nothing is sent
  Grid<double> sinr;             // effective SINR used by the allocator
  std::vector<int> assignment;   // user per subcarrier
  double ase = 0.0;
  double ase_quantized = 0.0;
  FeasibilityReport feasibility;
  double min_term = 0.0;
  double zeta = 0.0;
  DualState duals;
  int iterations = 0;
  std::vector<IterationRecord> trajectory;  // filled by single-realization solves
};

/// Steps 2/5/6 of the subgradient method: water-fill every (user, subcarrier),
/// assign by metric, then derive constellations, rates and the constraint usage.
AllocationResult allocate(const Grid<double>& sinr, const ScenarioWeights& weights,
                          const DualState& duals, double zeta, double min_term,
                          const SystemConfig& cfg);

/// Projected subgradient step on (mu, eta) followed by the step schedule
/// tau_i = tau_0 / sqrt(i).
DualState subgradient_update(const DualState& duals, const AllocationResult& result,
                             const ScenarioWeights& weights, const SystemConfig& cfg);

enum class RateMode { Continuous, Quantized };

/// Mean over realizations of sum_{n,k} phi log2 M.
double ase(std::span<const AllocationResult> results, RateMode mode = RateMode::Continuous);

struct KktReport {
  double power_slack = 0.0;
  double interference_slack = 0.0;
  double power_complementarity = 0.0;         // |mu (P_t - used)| / dual cost scale
  double interference_complementarity = 0.0;  // |eta (i_eff - used)| / dual cost scale
  double stationarity = 0.0;   // worst relative gradient residual over (n, k)
  double assignment_gap = 0.0; // relative metric shortfall of the chosen users
  double primal_violation = 0.0;
  bool dual_feasible = true;
  bool pass = false;
};

/// Audits a finished allocation. `average_power`, when given, replaces the
/// realization's own power usage in the power clauses (ensemble solves share
/// the power budget in expectation).
KktReport verify_kkt(const AllocationResult& result, const DualState& duals,
                     const ScenarioWeights& weights, const SystemConfig& cfg, double tol,
                     std::optional<double> average_power = std::nullopt);

}  // namespace cogradio
