#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vswap/bond.hpp"
#include "vswap/config.hpp"
#include "vswap/montecarlo.hpp"
#include "vswap/output.hpp"
#include "vswap/pricer.hpp"
#include "vswap/report.hpp"

// Command-line front end: price | mc | sweep | report, all driven by one
// key/value configuration file, emitting versioned CSV or JSON.
//
// Exit codes: 0 success, 1 validation failure, 2 usage/config error,
// 3 numerical failure.

namespace {

using vswap::config::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format;  // empty = take from config
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_path,
                  "write the artifact here instead of stdout");
  cmd->add_option("--format", args.format, "csv or json (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::string resolve_format(const CommonArgs& args, const RunConfig& cfg) {
  return args.format.empty() ? cfg.output_format : args.format;
}

void emit(const std::string& text, const CommonArgs& args) {
  if (args.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + args.out_path + "'");
  out << text;
}

void print_violations(const std::vector<vswap::model::Violation>& violations,
                      bool as_warning) {
  for (const auto& v : violations)
    std::cerr << (as_warning ? "warning: " : "error: ") << v.code << ": "
              << v.message << "\n";
}

/// Analytic commands treat every violation as fatal; simulation tolerates
/// Feller warnings.
int check_validation(const RunConfig& cfg, bool analytic) {
  std::vector<vswap::model::Violation> hard, feller;
  for (const auto& v : cfg.violations) (v.feller ? feller : hard).push_back(v);
  print_violations(hard, false);
  print_violations(feller, !analytic);
  if (!hard.empty() || (analytic && !feller.empty())) return 1;
  return 0;
}

std::vector<int> parse_frequencies(const std::string& arg) {
  std::vector<int> out;
  std::istringstream in(arg);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--frequencies",
                                 "'" + item + "' is not an integer");
    }
  }
  return out;
}

int run_price(const CommonArgs& args) {
  const RunConfig cfg = vswap::config::load_config(args.config_path);
  if (const int rc = check_validation(cfg, true)) return rc;
  const auto quote =
      vswap::pricer::fair_strike(cfg.params, cfg.market, cfg.swap, cfg.pricing);
  if (resolve_format(args, cfg) == "json")
    emit(vswap::output::to_json(quote).dump(2) + "\n", args);
  else
    emit(vswap::output::to_csv(quote), args);
  return 0;
}

int run_mc(const CommonArgs& args, long paths_override,
           std::uint64_t seed_override, bool seed_given) {
  RunConfig cfg = vswap::config::load_config(args.config_path);
  if (const int rc = check_validation(cfg, false)) return rc;
  if (paths_override > 0) cfg.mc.paths = paths_override;
  if (seed_given) cfg.mc.seed = seed_override;

  const auto sample =
      vswap::montecarlo::simulate_paths(cfg.params, cfg.market, cfg.swap, cfg.mc);
  const auto curve =
      vswap::bond::build_curve(cfg.swap.maturity, cfg.params, cfg.pricing.ode);
  const double bond = vswap::bond::bond_price(0.0, cfg.swap.maturity,
                                              cfg.market.r0, cfg.market.x0, curve);
  const auto est =
      vswap::montecarlo::mc_fair_strike(sample, cfg.swap, cfg.mc.seed, bond);
  if (resolve_format(args, cfg) == "json")
    emit(vswap::output::to_json(est).dump(2) + "\n", args);
  else
    emit(vswap::output::to_csv(est), args);
  return 0;
}

int run_sweep(const CommonArgs& args, const std::string& frequencies_arg,
              long paths_override, std::uint64_t seed_override, bool seed_given) {
  RunConfig cfg = vswap::config::load_config(args.config_path);
  if (const int rc = check_validation(cfg, paths_override <= 0)) return rc;
  if (seed_given) cfg.mc.seed = seed_override;

  std::vector<int> frequencies;
  if (frequencies_arg.empty())
    for (int n = 1; n <= 52; ++n) frequencies.push_back(n);
  else
    frequencies = parse_frequencies(frequencies_arg);

  const auto analytic = vswap::pricer::sweep(
      cfg.params, cfg.market, cfg.swap.maturity, frequencies, cfg.pricing);
  std::vector<vswap::output::SweepRow> rows;
  rows.reserve(analytic.size());
  for (const auto& [n_obs, strike] : analytic)
    rows.push_back({n_obs, strike, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()});

  if (paths_override > 0) {
    cfg.mc.paths = paths_override;
    for (auto& row : rows) {
      const vswap::model::SwapSpec swap{cfg.swap.maturity, row.n_obs,
                                        cfg.swap.notional};
      const auto sample =
          vswap::montecarlo::simulate_paths(cfg.params, cfg.market, swap, cfg.mc);
      const auto est = vswap::montecarlo::mc_fair_strike(sample, swap, cfg.mc.seed);
      row.mc_strike = est.strike;
      row.mc_std_error = est.std_error;
    }
  }

  if (resolve_format(args, cfg) == "json")
    emit(vswap::output::to_json(rows).dump(2) + "\n", args);
  else
    emit(vswap::output::to_csv(rows), args);
  return 0;
}

int run_report(const CommonArgs& args, const std::string& table) {
  if (table != "table2")
    throw CLI::ValidationError("report", "unknown table '" + table + "'");
  const RunConfig cfg = vswap::config::load_config(args.config_path);
  if (const int rc = check_validation(cfg, true)) return rc;
  const auto rows = vswap::report::state_table(cfg);
  if (resolve_format(args, cfg) == "json")
    emit(vswap::output::to_json(rows).dump(2) + "\n", args);
  else
    emit(vswap::output::to_csv(rows), args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discretely-sampled variance swap pricer under the "
               "regime-switching Heston-CIR model"};
  app.require_subcommand(1);

  CommonArgs price_args, mc_args, sweep_args, report_args;
  long mc_paths = 0, sweep_paths = 0;
  std::uint64_t mc_seed = 0, sweep_seed = 0;
  std::string frequencies_arg, report_table = "table2";

  auto* price = app.add_subcommand("price", "analytic fair strike");
  add_common(price, price_args);

  auto* mc = app.add_subcommand("mc", "Monte Carlo strike estimate");
  add_common(mc, mc_args);
  mc->add_option("--paths", mc_paths, "number of sample paths (overrides config)");
  auto* mc_seed_opt = mc->add_option("--seed", mc_seed, "RNG seed (overrides config)");

  auto* sweep = app.add_subcommand(
      "sweep", "fair strike per sampling frequency (analytic, MC optional)");
  add_common(sweep, sweep_args);
  sweep->add_option("--frequencies", frequencies_arg,
                    "comma-separated observation counts (default 1..52)");
  sweep->add_option("--paths", sweep_paths,
                    "add MC columns with this many paths per frequency (0 = off)");
  auto* sweep_seed_opt =
      sweep->add_option("--seed", sweep_seed, "RNG seed (overrides config)");

  auto* report =
      app.add_subcommand("report", "published-grid comparison (table2)");
  report->add_option("table", report_table, "table name (table2)");
  add_common(report, report_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (price->parsed()) return run_price(price_args);
    if (mc->parsed())
      return run_mc(mc_args, mc_paths, mc_seed, !mc_seed_opt->empty());
    if (sweep->parsed())
      return run_sweep(sweep_args, frequencies_arg, sweep_paths, sweep_seed,
                       !sweep_seed_opt->empty());
    if (report->parsed()) return run_report(report_args, report_table);
  } catch (const vswap::config::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vswap::numerics::NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
