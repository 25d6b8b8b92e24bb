#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogradio/allocator.hpp"

namespace cogradio {

struct SolverOptions {
  int max_iter = 500;
  double rel_tol = 1e-5;  // on the dual objective
  int patience = 5;       // consecutive iterations below rel_tol
};

/// Raised when no feasible allocation can be produced; keeps the iterates.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<IterationRecord> trajectory)
      : std::runtime_error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<IterationRecord>& trajectory() const { return trajectory_; }

 private:
  std::vector<IterationRecord> trajectory_;
};

/// Realizations solved jointly: the power budget holds on the sample average
/// (shared mu), the interference budget per realization (own eta).
struct EnsembleSolution {
  std::vector<AllocationResult> results;
  std::vector<ScenarioWeights> weights;
  double mu = 0.0;
  double average_power = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> trajectory;

  double ase(RateMode mode = RateMode::Continuous) const;
};

/// sinr * min_term / (P_t/K): the SINR at the realization's normalization power.
Grid<double> effective_sinr(const ChannelRealization& real, double min_term,
                            const SystemConfig& cfg);

AllocationResult solve(const SystemConfig& cfg, const EstimationModel& est,
                       const ScenarioSpec& scenario, const ChannelRealization& real,
                       const SolverOptions& options = {});

EnsembleSolution solve_ensemble(const SystemConfig& cfg, const EstimationModel& est,
                                const ScenarioSpec& scenario,
                                std::span<const ChannelRealization> realizations,
                                const SolverOptions& options = {});

}  // namespace cogradio
