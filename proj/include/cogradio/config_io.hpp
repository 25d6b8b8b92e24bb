#pragma once

// Flat `key = value` configuration files. Keys mirror the struct fields, with
// a section prefix for everything outside SystemConfig (scenario.kind,
// sweep.variable, fig2.law, ...). SystemConfig keys may be written bare or
// with a `system.` prefix. `#` starts a comment.

#include <map>
#include <string>
#include <string_view>

#include "cogradio/experiments.hpp"

namespace cogradio {

struct RunConfig {
  SystemConfig system;
  ScenarioSpec scenario;
  SolverOptions solver;
  SweepVariable sweep_variable = SweepVariable::IThreshold;
  std::vector<double> sweep_grid;
  int sweep_trials = 500;
  int solve_trials = 1;
  int cdf_samples = 100000;
  double cdf_direct_mean = 1.0;
  WeightLaw fig2_law = WeightLaw::gamma();
  int fig2_k = 64;
  int fig2_samples = 100000;
  int fig2_points = 101;
  int audit_trials = 10000;

  SweepSpec sweep_spec() const;
};

/// Raw key/value pairs; throws ParameterError naming the line on malformed
/// input or a repeated key.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Throws ParameterError on unknown keys or unparsable values.
RunConfig parse_run_config(std::string_view text);

}  // namespace cogradio
