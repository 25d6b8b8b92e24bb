#include "cogradio/scenario.hpp"

#include <fmt/format.h>

#include "cogradio/error.hpp"

namespace cogradio {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::PerfectDeterministic: return "PerfectDeterministic";
    case ScenarioKind::AverageCase: return "AverageCase";
    case ScenarioKind::WorstCase: return "WorstCase";
    case ScenarioKind::Probabilistic: return "Probabilistic";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "PerfectDeterministic" || text == "perfect") return ScenarioKind::PerfectDeterministic;
  if (text == "AverageCase" || text == "average") return ScenarioKind::AverageCase;
  if (text == "WorstCase" || text == "worst") return ScenarioKind::WorstCase;
  if (text == "Probabilistic" || text == "probabilistic") return ScenarioKind::Probabilistic;
  throw ParameterError(fmt::format("unknown scenario kind '{}'", text));
}

void ScenarioSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ParameterError(fmt::format("scenario rho must lie in [0, 1], got {}", rho));
  }
  const bool worst = kind == ScenarioKind::WorstCase;
  const bool prob = kind == ScenarioKind::Probabilistic;
  if (worst != pr.has_value()) {
    throw ParameterError(worst ? "worst-case scenario requires pr"
                               : "pr is only meaningful for the worst-case scenario");
  }
  if (prob != eps.has_value()) {
    throw ParameterError(prob ? "probabilistic scenario requires eps"
                              : "eps is only meaningful for the probabilistic scenario");
  }
  if (pr && !(*pr >= 0.0 && *pr < 1.0)) {
    throw ParameterError(fmt::format("pr must lie in [0, 1), got {}", *pr));
  }
  if (eps && !(*eps > 0.0 && *eps < 1.0)) {
    throw ParameterError(fmt::format("eps must lie in (0, 1), got {}", *eps));
  }
}

}  // namespace cogradio
