#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cogradio {

enum class ScenarioKind { PerfectDeterministic, AverageCase, WorstCase, Probabilistic };

std::string_view to_string(ScenarioKind kind);
/// Accepts the enumerator names and the short forms perfect/average/worst/probabilistic.
ScenarioKind parse_scenario_kind(std::string_view text);

/// Which interference regime is active. `pr` is set only for the worst case
/// and `eps` only for the probabilistic (collision-probability) case.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::PerfectDeterministic;
  double rho = 0.0;
  std::optional<double> pr;
  std::optional<double> eps;

  static ScenarioSpec perfect() { return {}; }
  static ScenarioSpec average(double rho) { return {ScenarioKind::AverageCase, rho, {}, {}}; }
  static ScenarioSpec worst(double rho, double pr) {
    return {ScenarioKind::WorstCase, rho, pr, {}};
  }
  static ScenarioSpec probabilistic(double rho, double eps) {
    return {ScenarioKind::Probabilistic, rho, {}, eps};
  }

  bool imperfect_csi() const { return kind != ScenarioKind::PerfectDeterministic; }
  void validate() const;
};

}  // namespace cogradio
