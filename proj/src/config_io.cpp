#include "cogradio/config_io.hpp"

#include <charconv>
#include <functional>

#include <fmt/format.h>

#include "cogradio/error.hpp"

namespace cogradio {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError(fmt::format("config key '{}': '{}' is not a number", key, text));
  }
  return value;
}

template <typename Int>
Int to_integer(const std::string& key, std::string_view text) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError(fmt::format("config key '{}': '{}' is not an integer", key, text));
  }
  return value;
}

std::vector<double> to_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ParameterError(fmt::format("config key '{}': empty list", key));
  return out;
}

WeightLaw law_named(std::string_view name) {
  if (name == "chi-square") return WeightLaw::chi_square();
  if (name == "gamma") return WeightLaw::gamma();
  if (name == "equal") return WeightLaw::equal(1.0);
  throw ParameterError(fmt::format("fig2.law must be chi-square, gamma or equal, got '{}'", name));
}

}  // namespace

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.variable = sweep_variable;
  s.grid = sweep_grid;
  s.trials = sweep_trials;
  s.scenario = scenario;
  s.base = system;
  s.solver = solver;
  return s;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ParameterError(fmt::format("config line {}: empty key or value", line_no));
    }
    if (key.starts_with("system.")) key.erase(0, 7);
    if (!out.emplace(key, value).second) {
      throw ParameterError(fmt::format("config line {}: key '{}' repeated", line_no, key));
    }
  }
  return out;
}

RunConfig parse_run_config(std::string_view text) {
  auto entries = parse_key_values(text);
  RunConfig rc;
  // The law picks the defaults that the remaining fig2 keys refine.
  if (const auto it = entries.find("fig2.law"); it != entries.end()) {
    rc.fig2_law = law_named(it->second);
    entries.erase(it);
  }
  // pr and eps exist only for their scenario kind, so the kind comes first too.
  if (const auto it = entries.find("scenario.kind"); it != entries.end()) {
    rc.scenario.kind = parse_scenario_kind(it->second);
    entries.erase(it);
  }

  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_integer<int>(k, v); };
  };
  SystemConfig& sys = rc.system;
  const std::map<std::string, Setter> setters = {
      {"n_users", integer(sys.n_users)},
      {"n_subcarriers", integer(sys.n_subcarriers)},
      {"p_total", real(sys.p_total)},
      {"i_threshold", real(sys.i_threshold)},
      {"ber_target", real(sys.ber_target)},
      {"noise_power", real(sys.noise_power)},
      {"primary_interference_power", real(sys.primary_interference_power)},
      {"direct_mean_min", real(sys.direct_mean_range.first)},
      {"direct_mean_max", real(sys.direct_mean_range.second)},
      {"cross_mean_re",
       [&sys](const std::string& k, const std::string& v) {
         sys.cross_mean.real(to_double(k, v));
       }},
      {"cross_mean_im",
       [&sys](const std::string& k, const std::string& v) {
         sys.cross_mean.imag(to_double(k, v));
       }},
      {"cross_variance", real(sys.cross_variance)},
      {"rng_seed",
       [&sys](const std::string& k, const std::string& v) {
         sys.rng_seed = to_integer<std::uint64_t>(k, v);
       }},
      {"scenario.rho", real(rc.scenario.rho)},
      {"scenario.pr",
       [&rc](const std::string& k, const std::string& v) { rc.scenario.pr = to_double(k, v); }},
      {"scenario.eps",
       [&rc](const std::string& k, const std::string& v) { rc.scenario.eps = to_double(k, v); }},
      {"solver.max_iter", integer(rc.solver.max_iter)},
      {"solver.rel_tol", real(rc.solver.rel_tol)},
      {"solver.patience", integer(rc.solver.patience)},
      {"sweep.variable",
       [&rc](const std::string&, const std::string& v) {
         rc.sweep_variable = parse_sweep_variable(v);
       }},
      {"sweep.grid",
       [&rc](const std::string& k, const std::string& v) { rc.sweep_grid = to_list(k, v); }},
      {"sweep.trials", integer(rc.sweep_trials)},
      {"solve.trials", integer(rc.solve_trials)},
      {"cdf.samples", integer(rc.cdf_samples)},
      {"cdf.direct_mean", real(rc.cdf_direct_mean)},
      {"fig2.shape", real(rc.fig2_law.shape)},
      {"fig2.scale", real(rc.fig2_law.scale)},
      {"fig2.location", real(rc.fig2_law.location)},
      {"fig2.delta2", real(rc.fig2_law.delta2)},
      {"fig2.noncentrality", real(rc.fig2_law.noncentrality)},
      {"fig2.k", integer(rc.fig2_k)},
      {"fig2.samples", integer(rc.fig2_samples)},
      {"fig2.points", integer(rc.fig2_points)},
      {"audit.trials", integer(rc.audit_trials)},
  };
  for (const auto& [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParameterError(fmt::format("unknown config key '{}'", key));
    it->second(key, value);
  }
  rc.system.validate();
  rc.scenario.validate();
  return rc;
}

}  // namespace cogradio
