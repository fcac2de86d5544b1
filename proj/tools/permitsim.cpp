// permitsim — deterministic simulator for a multi-period transferable-permits
// market with strategic trading, endogenous technology adoption, an optional
// price-support instrument, and Monte Carlo self-financing analysis.
//
// Subcommands:
//   adopt       technology trajectories and expected price streams
//   montecarlo  realized-phase ensembles, distribution tables, risk report
//   market      one-shot equilibrium on a file of net positions
//
// Exit codes: 0 success, 2 invalid configuration or input, 3 solver failure,
// 4 enumeration budget exceeded.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "permits/adoption.hpp"
#include "permits/config.hpp"
#include "permits/phase.hpp"
#include "permits/risk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace permits;

namespace {

constexpr const char* kEngineVersion = "0.1.0";
const std::vector<double> kReportLambdas{0.10, 0.05, 0.01};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_lambda(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

struct OutputSet {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path.string());
  }
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "permitsim_out";
  std::uint64_t seed = 0;
  std::vector<double> pg_sweep;
  std::string mode = "expected";
  std::string matching = "proportional";
  std::string risk_convention = "standard";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_config = true) {
  if (with_config)
    cmd->add_option("--config", flags.config_path, "model configuration (JSON)")->required();
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed for generator streams");
  cmd->add_option("--pg-sweep", flags.pg_sweep, "comma-separated price-support levels")
      ->delimiter(',');
  cmd->add_option("--mode", flags.mode, "expectation mode")
      ->check(CLI::IsMember({"expected", "conditional"}));
  cmd->add_option("--matching", flags.matching, "order matching")
      ->check(CLI::IsMember({"proportional", "stochastic"}));
  cmd->add_option("--risk-convention", flags.risk_convention, "sign convention in risk reports")
      ->check(CLI::IsMember({"standard", "paper"}));
}

ModelParams load_checked(const std::string& path) {
  ModelParams model = load_model_file(path);
  const ValidationReport report = validate(model);
  if (!report.ok())
    throw ConfigError("configuration invalid:\n" + report.to_string());
  return model;
}

PhaseOptions phase_options(const CommonFlags& flags) {
  PhaseOptions options;
  options.matching = flags.matching == "stochastic" ? Matching::Stochastic
                                                    : Matching::Proportional;
  options.mode = flags.mode == "conditional" ? ExpectationMode::Conditional
                                             : ExpectationMode::Deterministic;
  return options;
}

void write_manifest(OutputSet& outputs, const std::string& command, const ModelParams& model,
                    std::uint64_t seed, std::chrono::steady_clock::time_point started) {
  // Wall-clock timing makes this the one output that is not byte-stable.
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest;
  manifest["command"] = command;
  manifest["config_hash"] = hash_hex(to_json(model).dump());
  manifest["engine_version"] = kEngineVersion;
  manifest["seed"] = seed;
  manifest["outputs"] = outputs.written;
  manifest["timing_seconds"] = elapsed;
  outputs.write("run_manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// adopt

std::string trajectory_csv(const AdoptionTrajectory& trajectory, std::size_t firms) {
  std::string csv = "period,firm,status,expected_price\n";
  for (std::size_t t = 0; t < trajectory.status.size(); ++t) {
    for (std::size_t i = 0; i < firms; ++i) {
      csv += std::to_string(t) + "," + std::to_string(i) + ",";
      csv += trajectory.status[t][i] == Tech::New ? "new" : "old";
      csv += "," + fmt(trajectory.expected_price[t]) + "\n";
    }
  }
  return csv;
}

int adoption_period_or_minus_one(int tau) { return tau == kNever ? -1 : tau; }

void run_adopt(const CommonFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const ModelParams model = load_checked(flags.config_path);
  OutputSet outputs{fs::path(flags.out_dir), {}};

  ModelParams base = model;
  base.policy.price_support = 0.0;
  const AdoptionTrajectory without = run_adoption(base);
  const AdoptionTrajectory with = run_adoption(model);
  const std::size_t m = model.firm_count();

  outputs.write("trajectory_no_support.csv", trajectory_csv(without, m));
  outputs.write("trajectory_support.csv", trajectory_csv(with, m));

  std::string times = "firm,adopt_period_no_support,adopt_period_support\n";
  for (std::size_t i = 0; i < m; ++i)
    times += std::to_string(i) + "," +
             std::to_string(adoption_period_or_minus_one(without.adoption_time[i])) + "," +
             std::to_string(adoption_period_or_minus_one(with.adoption_time[i])) + "\n";
  outputs.write("adoption_times.csv", times);

  std::string summary =
      "period,adopters_no_support,adopters_support,price_no_support,price_support\n";
  for (int t = 0; t < model.policy.horizon; ++t) {
    const auto u = static_cast<std::size_t>(t);
    summary += std::to_string(t) + "," + std::to_string(without.status[u].count_new()) + "," +
               std::to_string(with.status[u].count_new()) + "," +
               fmt(without.expected_price[u]) + "," + fmt(with.expected_price[u]) + "\n";
  }
  outputs.write("adoption_summary.csv", summary);

  if (!flags.pg_sweep.empty()) {
    std::string sweep = "price_support,period,cumulative_adopters,expected_price\n";
    std::string firsts = "price_support,first_adoption_period\n";
    for (double pg : flags.pg_sweep) {
      ModelParams swept = model;
      swept.policy.price_support = pg;
      const ValidationReport report = validate(swept);
      if (!report.ok()) throw ConfigError("sweep value invalid:\n" + report.to_string());
      const AdoptionTrajectory trajectory = run_adoption(swept);
      int first = -1;
      for (int tau : trajectory.adoption_time)
        if (tau != kNever && (first < 0 || tau < first)) first = tau;
      firsts += fmt(pg) + "," + std::to_string(first) + "\n";
      for (int t = 0; t < swept.policy.horizon; ++t) {
        const auto u = static_cast<std::size_t>(t);
        sweep += fmt(pg) + "," + std::to_string(t) + "," +
                 std::to_string(trajectory.status[u].count_new()) + "," +
                 fmt(trajectory.expected_price[u]) + "\n";
      }
    }
    outputs.write("sweep_adoption.csv", sweep);
    outputs.write("sweep_first_adoption.csv", firsts);
  }

  write_manifest(outputs, "adopt", model, flags.seed, started);
}

// ---------------------------------------------------------------------------
// montecarlo

json risk_report(const EmpiricalSample& nets, std::uint64_t seed, const std::string& convention) {
  json report;
  report["convention"] = convention;
  report["count"] = nets.size();
  report["seed"] = seed;
  for (double lambda : kReportLambdas) {
    const double var_std = value_at_risk(nets, lambda, RiskConvention::Standard);
    const double var_paper = value_at_risk(nets, lambda, RiskConvention::Paper);
    const double avar = average_value_at_risk(nets, lambda);
    json entry;
    entry["var"]["standard"] = var_std;
    entry["var"]["paper"] = var_paper;
    // the tail-average definition already carries the monetary sign
    entry["avar"]["standard"] = avar;
    entry["avar"]["paper"] = avar;
    entry["acceptable"]["var"] = assess_self_financing(nets, RiskMeasure::VaR, lambda).acceptable;
    entry["acceptable"]["avar"] =
        assess_self_financing(nets, RiskMeasure::AVaR, lambda).acceptable;
    entry["selected"]["var"] = convention == "paper" ? var_paper : var_std;
    entry["selected"]["avar"] = avar;
    report["lambda"][fmt_lambda(lambda)] = entry;
  }
  return report;
}

void write_ensemble(OutputSet& outputs, const std::string& prefix, const EnsembleResult& result,
                    const CommonFlags& flags) {
  std::string nets_csv = "path_index,x_in,x_out,net\n";
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    const SampleStats& s = result.samples[k];
    nets_csv += std::to_string(k) + "," + fmt(s.x_in) + "," + fmt(s.x_out) + "," + fmt(s.net()) +
                "\n";
  }
  outputs.write(prefix + "nets.csv", nets_csv);

  const EmpiricalSample nets(result.nets());
  const DistributionTable table = empirical_cdf_pdf(nets, 40);
  std::string cdf = "value,cdf\n";
  for (std::size_t i = 0; i < table.support.size(); ++i)
    cdf += fmt(table.support[i]) + "," + fmt(table.cdf[i]) + "\n";
  outputs.write(prefix + "cdf.csv", cdf);
  std::string pdf = "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b < table.density.size(); ++b)
    pdf += fmt(table.bin_left[b]) + "," + fmt(table.bin_right[b]) + "," + fmt(table.density[b]) +
           "\n";
  outputs.write(prefix + "pdf.csv", pdf);

  json summary;
  summary["count"] = nets.size();
  summary["max"] = nets.max();
  summary["mean"] = nets.mean();
  summary["min"] = nets.min();
  summary["seed"] = result.seed;
  summary["stddev"] = nets.stddev();
  outputs.write(prefix + "summary.json", summary.dump(2) + "\n");

  outputs.write(prefix + "risk.json",
                risk_report(nets, result.seed, flags.risk_convention).dump(2) + "\n");
}

void run_montecarlo(const CommonFlags& flags, int paths) {
  const auto started = std::chrono::steady_clock::now();
  const ModelParams model = load_checked(flags.config_path);
  OutputSet outputs{fs::path(flags.out_dir), {}};
  const PhaseOptions options = phase_options(flags);

  const EnsembleResult result = monte_carlo(model, paths, flags.seed, options);
  write_ensemble(outputs, "", result, flags);

  if (!flags.pg_sweep.empty()) {
    std::string sweep =
        "price_support,lambda,var_standard,var_paper,avar,acceptable_var,acceptable_avar\n";
    for (double pg : flags.pg_sweep) {
      ModelParams swept = model;
      swept.policy.price_support = pg;
      const ValidationReport report = validate(swept);
      if (!report.ok()) throw ConfigError("sweep value invalid:\n" + report.to_string());
      // Same seed for every sweep value: identical economy paths, so the
      // comparison across support levels is noise-free.
      const EnsembleResult swept_result = monte_carlo(swept, paths, flags.seed, options);
      OutputSet sub_outputs{fs::path(flags.out_dir) / ("pg_" + fmt(pg)), {}};
      write_ensemble(sub_outputs, "", swept_result, flags);
      for (const std::string& w : sub_outputs.written) outputs.written.push_back(w);

      const EmpiricalSample nets(swept_result.nets());
      for (double lambda : kReportLambdas) {
        sweep += fmt(pg) + "," + fmt_lambda(lambda) + "," +
                 fmt(value_at_risk(nets, lambda, RiskConvention::Standard)) + "," +
                 fmt(value_at_risk(nets, lambda, RiskConvention::Paper)) + "," +
                 fmt(average_value_at_risk(nets, lambda)) + "," +
                 (assess_self_financing(nets, RiskMeasure::VaR, lambda).acceptable ? "1" : "0") +
                 "," +
                 (assess_self_financing(nets, RiskMeasure::AVaR, lambda).acceptable ? "1" : "0") +
                 "\n";
      }
    }
    outputs.write("sweep_risk.csv", sweep);
  }

  write_manifest(outputs, "montecarlo", model, flags.seed, started);
}

// ---------------------------------------------------------------------------
// market

struct NamedPosition {
  std::string id;
  double x = 0.0;
  Tech tech = Tech::Old;
  double profit = 0.0;
};

std::vector<NamedPosition> load_positions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open positions file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" for stream input
    throw ConfigError("positions file " + path + ": " + e.what());
  }
  if (!doc.contains("positions") || !doc["positions"].is_array())
    throw ConfigError("positions file needs a top-level 'positions' array");
  std::vector<NamedPosition> positions;
  for (const json& entry : doc["positions"]) {
    NamedPosition p;
    p.id = entry.value("id", "firm-" + std::to_string(positions.size()));
    if (!entry.contains("x") || !entry["x"].is_number())
      throw ConfigError("position '" + p.id + "' needs a numeric 'x'");
    p.x = entry["x"].get<double>();
    const std::string tech = entry.value("tech", "old");
    if (tech != "old" && tech != "new")
      throw ConfigError("position '" + p.id + "': tech must be 'old' or 'new'");
    p.tech = tech == "new" ? Tech::New : Tech::Old;
    p.profit = entry.value("profit", 0.0);
    positions.push_back(p);
  }
  if (positions.empty()) throw ConfigError("positions file holds no positions");
  return positions;
}

void run_market(const std::string& positions_path, double penalty, double price_support) {
  const std::vector<NamedPosition> named = load_positions(positions_path);
  if (!(penalty > 0.0)) throw ConfigError("penalty must be positive");
  if (!(price_support >= 0.0 && price_support < penalty))
    throw ConfigError("price support must lie in [0, penalty)");

  std::vector<double> x(named.size());
  TechnologyVector tech;
  std::vector<double> profits(named.size());
  for (std::size_t i = 0; i < named.size(); ++i) {
    x[i] = named[i].x;
    tech.status.push_back(named[i].tech);
    profits[i] = named[i].profit;
  }

  const MarketOutcome outcome = clear_market(x, tech, penalty, price_support);
  const std::vector<double> payoff = period_payoffs(outcome, tech, profits, penalty,
                                                    price_support);

  json report;
  report["demand"] = outcome.demand;
  report["supply_capacity"] = outcome.supply_capacity;
  report["submitted"] = outcome.submitted;
  report["price"] = outcome.clearing_price;
  if (outcome.demand <= 0.0)
    report["note"] = "no market";
  else if (outcome.supply_capacity <= 0.0)
    report["note"] = "no supply";
  for (std::size_t i = 0; i < named.size(); ++i) {
    json firm;
    firm["role"] = outcome.capacity[i] > 0.0 ? "seller" : "buyer";
    firm["position"] = x[i];
    firm["submission"] = outcome.submission[i];
    firm["cashed"] = outcome.cashed[i];
    firm["executed"] = outcome.executed[i];
    firm["uncovered"] = outcome.uncovered[i];
    firm["payoff"] = payoff[i];
    report["firms"][named[i].id] = firm;
  }
  std::cout << report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transferable-permits market and technology-adoption simulator"};
  app.require_subcommand(1);

  CommonFlags adopt_flags, mc_flags;
  int paths = 2000;
  std::string positions_path;
  double penalty = 10.0, price_support = 0.0;

  CLI::App* adopt = app.add_subcommand("adopt", "technology trajectories and price streams");
  add_common_flags(adopt, adopt_flags);

  CLI::App* mc = app.add_subcommand("montecarlo", "Monte Carlo phase ensemble and risk report");
  add_common_flags(mc, mc_flags);
  mc->add_option("--paths", paths, "number of simulated paths")->check(CLI::PositiveNumber);

  CLI::App* market = app.add_subcommand("market", "clear one market from a positions file");
  market->add_option("positions", positions_path, "JSON file of net positions")->required();
  market->add_option("--penalty", penalty, "penalty per uncovered unit")->required();
  market->add_option("--price-support", price_support, "support paid per cashed permit");

  try {
    app.parse(argc, argv);
    if (adopt->parsed()) run_adopt(adopt_flags);
    if (mc->parsed()) run_montecarlo(mc_flags, paths);
    if (market->parsed()) run_market(positions_path, penalty, price_support);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << " (rounds: " << e.rounds << ")\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
