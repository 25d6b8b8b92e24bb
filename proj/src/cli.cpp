#include "cogradio/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cogradio/config_io.hpp"
#include "cogradio/error.hpp"

namespace cogradio {

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(exit_code::kIo, fmt::format("cannot read config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw CliError(exit_code::kIo, fmt::format("error reading '{}'", path));
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(exit_code::kIo, fmt::format("cannot open output file '{}'", path));
  out << content;
  out.flush();
  if (!out) throw CliError(exit_code::kIo, fmt::format("error writing '{}'", path));
}

template <typename T>
Json grid_json(const Grid<T>& g) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const auto row = g.row(r);
    rows.push_back(std::vector<T>(row.begin(), row.end()));
  }
  return rows;
}

Json scenario_json(const ScenarioSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"rho", s.rho},
          {"pr", s.pr ? Json(*s.pr) : Json(nullptr)},
          {"eps", s.eps ? Json(*s.eps) : Json(nullptr)}};
}

std::string solve_output(const RunConfig& rc, OutputFormat format, std::ostream& log) {
  const SystemConfig& cfg = rc.system;
  const EstimationModel est = estimation_for(rc.scenario, cfg);
  const Grid<double> means = draw_direct_means(cfg);
  if (rc.solve_trials < 1) throw ParameterError("solve.trials must be >= 1");
  std::vector<ChannelRealization> reals;
  for (int t = 0; t < rc.solve_trials; ++t) {
    Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(t)));
    reals.push_back(sample_realization(cfg, est, means, rng));
  }
  const EnsembleSolution sol = solve_ensemble(cfg, est, rc.scenario, reals, rc.solver);
  log << fmt::format("solved {} realization(s): ase {:.6g} after {} iterations\n", reals.size(),
                     sol.ase(), sol.iterations);

  if (format == OutputFormat::Csv) {
    std::string out = "realization,user,subcarrier,phi,power,constellation,rate,quantized_rate,cutoff\n";
    for (std::size_t r = 0; r < sol.results.size(); ++r) {
      const AllocationResult& res = sol.results[r];
      for (std::size_t n = 0; n < res.phi.rows(); ++n) {
        for (std::size_t k = 0; k < res.phi.cols(); ++k) {
          out += fmt::format("{},{},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", r, n, k,
                             res.phi(n, k), res.power(n, k), res.constellation(n, k),
                             res.rates(n, k), res.quantized_rates(n, k), res.cutoff(n, k));
        }
      }
    }
    return out;
  }

  Json j;
  j["scenario"] = scenario_json(rc.scenario);
  j["seed"] = cfg.rng_seed;
  j["zeta"] = zeta(cfg.ber_target);
  j["ase"] = sol.ase(RateMode::Continuous);
  j["ase_quantized"] = sol.ase(RateMode::Quantized);
  j["mu"] = sol.mu;
  j["average_power"] = sol.average_power;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  Json list = Json::array();
  for (std::size_t r = 0; r < sol.results.size(); ++r) {
    const AllocationResult& res = sol.results[r];
    const KktReport kkt =
        verify_kkt(res, res.duals, sol.weights[r], cfg, 1e-3, sol.average_power);
    Json item;
    item["eta"] = res.duals.eta;
    item["min_term"] = res.min_term;
    item["ase"] = res.ase;
    item["power_used"] = res.feasibility.power_used;
    item["interference_used"] = res.feasibility.interference_used;
    item["interference_budget"] = res.feasibility.interference_budget;
    item["phi"] = grid_json(res.phi);
    item["power"] = grid_json(res.power);
    item["constellation"] = grid_json(res.constellation);
    item["rates"] = grid_json(res.rates);
    item["quantized_rates"] = grid_json(res.quantized_rates);
    item["cutoff"] = grid_json(res.cutoff);
    item["sinr"] = grid_json(res.sinr);
    item["kkt"] = {{"pass", kkt.pass},
                   {"power_complementarity", kkt.power_complementarity},
                   {"interference_complementarity", kkt.interference_complementarity},
                   {"stationarity", kkt.stationarity},
                   {"assignment_gap", kkt.assignment_gap},
                   {"primal_violation", kkt.primal_violation}};
    list.push_back(item);
  }
  j["realizations"] = list;
  return j.dump(2) + "\n";
}

std::string cdf_table(const std::vector<double>& x, const std::vector<double>& empirical,
                      const std::vector<double>& approx, double gap, OutputFormat format,
                      const Json& metadata) {
  if (format == OutputFormat::Json) {
    Json j;
    j["metadata"] = metadata;
    j["gamma"] = x;
    j["empirical"] = empirical;
    j["approx"] = approx;
    j["sup_gap"] = gap;
    return j.dump(2) + "\n";
  }
  std::string out = "gamma,empirical,approx\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += fmt::format("{:.10g},{:.10g},{:.10g}\n", x[i], empirical[i], approx[i]);
  }
  out += fmt::format("sup_gap,{:.10g},\n", gap);
  return out;
}

std::string validate_cdf_output(const RunConfig& rc, OutputFormat format, std::ostream& log) {
  const EstimationModel est = estimation_for(rc.scenario, rc.system);
  const auto table = empirical_sinr_cdf(rc.system, est, rc.cdf_direct_mean, rc.cdf_samples,
                                        mix_seed(rc.system.rng_seed, 0xCDF));
  const SinrDistParams params = sinr_params_for(rc.system, est, rc.cdf_direct_mean);
  std::vector<double> sorted;
  sorted.reserve(table.size());
  for (const CdfPoint& p : table) sorted.push_back(p.x);
  const double gap =
      sup_gap(std::span<const double>(sorted), [&](double g) { return sinr_cdf(g, params); });

  std::vector<double> x, emp, approx;
  constexpr int kRows = 101;
  for (int i = 0; i < kRows; ++i) {
    const std::size_t idx = std::min(sorted.size() - 1, i * (sorted.size() - 1) / (kRows - 1));
    x.push_back(sorted[idx]);
    emp.push_back(table[idx].empirical);
    approx.push_back(sinr_cdf(sorted[idx], params));
  }
  log << fmt::format("sinr cdf sup gap {:.6g} over {} samples\n", gap, sorted.size());
  const Json meta = {{"samples", rc.cdf_samples},
                     {"direct_mean", rc.cdf_direct_mean},
                     {"seed", rc.system.rng_seed},
                     {"nsp_mean", params.nsp.mean},
                     {"nsp_variance", params.nsp.variance}};
  return cdf_table(x, emp, approx, gap, format, meta);
}

std::string validate_fig2_output(const RunConfig& rc, OutputFormat format, std::ostream& log) {
  const Fig2Result res = fig2_validation(rc.fig2_law, rc.fig2_k, rc.fig2_samples,
                                         mix_seed(rc.system.rng_seed, 0xF162), rc.fig2_points);
  log << fmt::format("{}: sup gap {:.6g}\n", res.law, res.sup_gap);
  const Json meta = {{"law", res.law},
                     {"k", rc.fig2_k},
                     {"samples", rc.fig2_samples},
                     {"seed", rc.system.rng_seed},
                     {"approx_dof", res.approx.dof},
                     {"approx_noncentrality", res.approx.noncentrality},
                     {"approx_scale", res.approx.scale}};
  return cdf_table(res.grid, res.empirical, res.approximate, res.sup_gap, format, meta);
}

std::string audit_output(const RunConfig& rc, OutputFormat format, std::ostream& log) {
  const EstimationModel est = estimation_for(rc.scenario, rc.system);
  const AuditResult a = violation_audit(rc.system, est, rc.scenario, rc.audit_trials, rc.solver);
  const double eps = *rc.scenario.eps;
  const double bound = eps + 3.0 * a.std_error;
  log << fmt::format("violation rate {:.6g} (bound {:.6g}) over {} trials\n", a.rate, bound,
                     a.trials);
  if (format == OutputFormat::Json) {
    Json j;
    j["scenario"] = scenario_json(rc.scenario);
    j["seed"] = rc.system.rng_seed;
    j["trials"] = a.trials;
    j["violation_rate"] = a.rate;
    j["std_error"] = a.std_error;
    j["bound"] = bound;
    j["ase"] = a.ase;
    j["within_bound"] = a.rate <= bound;
    return j.dump(2) + "\n";
  }
  return fmt::format("eps,trials,violation_rate,std_error,bound,ase,within_bound\n"
                     "{:.10g},{},{:.10g},{:.10g},{:.10g},{:.10g},{}\n",
                     eps, a.trials, a.rate, a.std_error, bound, a.ase, a.rate <= bound ? 1 : 0);
}

}  // namespace

CliInvocation parse_args(int argc, const char* const* argv) {
  CLI::App app{"Resource allocation for OFDMA underlay cognitive radio"};
  app.require_subcommand(1, 1);
  CliInvocation inv;
  std::optional<std::uint64_t> seed;
  std::string format;

  struct Entry {
    const char* name;
    const char* help;
    Subcommand kind;
  };
  const Entry names[] = {
      {"solve", "allocate one or more realizations", Subcommand::Solve},
      {"sweep", "ASE against one swept parameter", Subcommand::Sweep},
      {"validate-cdf", "empirical vs analytic SINR cdf", Subcommand::ValidateCdf},
      {"validate-fig2", "weighted chi-square sum vs its approximation", Subcommand::ValidateFig2},
      {"audit-collision", "true-channel violation rate", Subcommand::AuditCollision},
  };
  std::vector<std::pair<CLI::App*, Subcommand>> subs;
  for (const auto& [name, help, kind] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "configuration file")->required();
    sub->add_option("--out", inv.output_path, "output file")->required();
    sub->add_option("--seed", seed, "master seed, overrides rng_seed");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    subs.emplace_back(sub, kind);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw CliError(e.get_exit_code() == 0 ? 0 : exit_code::kUsage,
                   e.get_exit_code() == 0 ? app.help() : std::string(e.what()));
  }
  for (const auto& [sub, kind] : subs) {
    if (sub->parsed()) inv.subcommand = kind;
  }
  if (inv.config_path.empty() || inv.output_path.empty()) {
    throw CliError(exit_code::kUsage, "--config and --out must be nonempty");
  }
  inv.seed_override = seed;
  if (format.empty()) {
    format = inv.output_path.ends_with(".json") ? "json" : "csv";
  }
  inv.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  std::ifstream probe(inv.config_path);
  if (!probe) throw CliError(exit_code::kIo, fmt::format("cannot read config file '{}'", inv.config_path));
  return inv;
}

int run(const CliInvocation& inv, std::ostream& log) {
  RunConfig rc;
  try {
    rc = parse_run_config(read_file(inv.config_path));
    if (inv.seed_override) rc.system.rng_seed = *inv.seed_override;
  } catch (const std::invalid_argument& e) {
    throw CliError(exit_code::kUsage, fmt::format("{}: {}", inv.config_path, e.what()));
  }

  std::string output;
  int status = exit_code::kOk;
  try {
    switch (inv.subcommand) {
      case Subcommand::Solve:
        output = solve_output(rc, inv.format, log);
        break;
      case Subcommand::Sweep: {
        const SweepResult res = run_sweep(rc.sweep_spec());
        output = inv.format == OutputFormat::Json ? sweep_to_json(res) : sweep_to_csv(res);
        for (const SweepPoint& p : res.points) {
          if (!p.ok()) log << fmt::format("point {} failed: {}\n", p.value, p.status);
        }
        if (!res.all_ok()) status = exit_code::kPointFailed;
        break;
      }
      case Subcommand::ValidateCdf:
        output = validate_cdf_output(rc, inv.format, log);
        break;
      case Subcommand::ValidateFig2:
        output = validate_fig2_output(rc, inv.format, log);
        break;
      case Subcommand::AuditCollision:
        if (rc.scenario.kind != ScenarioKind::Probabilistic) {
          throw ParameterError("audit-collision needs scenario.kind = probabilistic");
        }
        output = audit_output(rc, inv.format, log);
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw CliError(exit_code::kUsage, e.what());
  }
  write_file(inv.output_path, output);
  return status;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_args(argc, argv), err);
  } catch (const CliError& e) {
    (e.code() == 0 ? out : err) << e.what() << (e.code() == 0 ? "" : "\n");
    return e.code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kPointFailed;
  }
}

}  // namespace cogradio
