// twdmsim: command-line driver for the TWDM-PON virtual-DBA simulator.
//
//   twdmsim run            one scenario, compliance + runtime summary
//   twdmsim sweep          Cartesian parameter sweep, CSV/JSON table
//   twdmsim profile        per-frame merge runtime across line capacities
//   twdmsim oracle-compare greedy vs exact objective on small instances
//
// Exit codes: 0 success, 1 configuration error, 2 internal invariant failure.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twdm/errors.hpp"
#include "twdm/harness.hpp"
#include "twdm/oracle.hpp"

namespace {

struct CommonOptions {
  std::uint64_t seed = 1;
  std::optional<long> frames;
  std::string format = "csv";
  bool quick = false;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "Base RNG seed");
  cmd->add_option("--frames", opt.frames, "Frames to simulate per repetition");
  cmd->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--quick", opt.quick, "Reduced workload smoke run");
  cmd->add_option("-o,--output", opt.out_path, "Write output to a file");
}

std::ostream& open_output(const CommonOptions& opt, std::ofstream& file) {
  if (opt.out_path.empty()) return std::cout;
  file.open(opt.out_path);
  if (!file)
    throw twdm::ConfigError("cannot open output file " + opt.out_path);
  return file;
}

int cmd_run(const CommonOptions& opt, const std::string& scenario_path,
            const std::string& algorithm, double load, double sla_fraction,
            double tuning_us, const std::string& preset,
            const std::string& distribution, int repetitions, bool validate) {
  twdm::Scenario s;
  if (!scenario_path.empty()) s = twdm::Scenario::from_json_file(scenario_path);
  if (!preset.empty()) twdm::apply_channel_preset(s, preset);
  if (!algorithm.empty()) s.algorithm = twdm::algorithm_from_name(algorithm);
  if (!distribution.empty())
    s.distribution = twdm::distribution_from_name(distribution);
  if (load > 0.0) s.load = load;
  if (sla_fraction >= 0.0) s.sla_fraction = sla_fraction;
  if (tuning_us >= 0.0) s.tuning_us = tuning_us;
  if (repetitions > 0) s.repetitions = repetitions;
  if (validate) s.validate = true;
  s.seed = opt.seed;
  if (opt.frames) s.frames = *opt.frames;
  if (opt.quick) s.frames = std::min(s.frames, 100L);
  s.id = s.make_id();
  s.check();

  twdm::RunResult result = twdm::run_scenario(s);
  std::ofstream file;
  std::ostream& out = open_output(opt, file);
  if (opt.format == "json")
    twdm::write_run_json(out, s, result);
  else
    twdm::write_sweep_csv(out, {s}, {result});
  return result.violations == 0 ? 0 : 2;
}

int cmd_sweep(const CommonOptions& opt, const std::string& config_path) {
  twdm::SweepConfig cfg;
  if (!config_path.empty()) cfg = twdm::SweepConfig::from_json_file(config_path);
  cfg.seed = opt.seed;
  if (opt.frames) cfg.frames = *opt.frames;
  if (opt.quick) {
    cfg.frames = std::min(cfg.frames, 50L);
    cfg.sla_fractions = {0.2, 1.0};
  }

  std::vector<twdm::Scenario> cells = cfg.expand();
  std::vector<twdm::RunResult> results;
  for (const auto& cell : cells) results.push_back(twdm::run_scenario(cell));

  std::ofstream file;
  std::ostream& out = open_output(opt, file);
  if (opt.format == "json") {
    out << "[\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      twdm::write_run_json(out, cells[i], results[i]);
      if (i + 1 < results.size()) out << ",\n";
    }
    out << "]\n";
  } else {
    twdm::write_sweep_csv(out, cells, results);
  }
  return 0;
}

int cmd_profile(const CommonOptions& opt, std::vector<double> capacities) {
  if (capacities.empty()) capacities = {50.0, 100.0, 200.0};
  long frames = opt.frames.value_or(opt.quick ? 50L : 500L);
  auto rows = twdm::profile_runtime(capacities, frames, opt.seed);
  std::ofstream file;
  std::ostream& out = open_output(opt, file);
  if (opt.format == "json") {
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << "  {\"capacity_gbps\": " << rows[i].capacity_gbps
          << ", \"algorithm\": \"" << twdm::algorithm_name(rows[i].algorithm)
          << "\", \"median_us\": " << rows[i].median_us
          << ", \"iqr_us\": " << rows[i].iqr_us << "}"
          << (i + 1 < rows.size() ? ",\n" : "\n");
    }
    out << "]\n";
  } else {
    twdm::write_profile_csv(out, rows);
  }
  return 0;
}

int cmd_oracle_compare(const CommonOptions& opt,
                       const std::vector<std::string>& instance_paths,
                       int count, double threshold) {
  std::vector<std::pair<std::string, twdm::OracleInstance>> instances;
  if (!instance_paths.empty()) {
    for (const auto& path : instance_paths)
      instances.emplace_back(path, twdm::load_instance(path));
  } else {
    int n = opt.quick ? std::min(count, 25) : count;
    twdm::OracleRandomParams params;
    params.threshold = threshold;
    for (int i = 0; i < n; ++i) {
      std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(i);
      params.n_allocations = 5 + static_cast<int>(seed % 6);  // 5..10
      instances.emplace_back("random-" + std::to_string(seed),
                             twdm::random_instance(seed, params));
    }
  }

  std::ofstream file;
  std::ostream& out = open_output(opt, file);
  long equal = 0;
  bool dominated = true;
  if (opt.format == "csv")
    out << "schema_version,instance,allocations,channels,greedy_objective,"
           "exact_objective,gap,nodes_explored\n";
  for (const auto& [name, inst] : instances) {
    twdm::OracleSolution greedy = twdm::solve_greedy(inst);
    twdm::OracleSolution exact = twdm::solve_exact(inst);
    if (exact.objective > greedy.objective) dominated = false;
    if (exact.objective == greedy.objective) ++equal;
    if (opt.format == "csv")
      out << "twdm-v1," << name << ',' << inst.allocations.size() << ','
          << inst.n_channels << ',' << greedy.objective << ','
          << exact.objective << ',' << greedy.objective - exact.objective
          << ',' << exact.nodes_explored << '\n';
  }
  double rate = instances.empty()
                    ? 1.0
                    : static_cast<double>(equal) / instances.size();
  if (opt.format == "json") {
    out << "{\"schema_version\": \"twdm-v1\", \"instances\": "
        << instances.size() << ", \"equal\": " << equal
        << ", \"equality_rate\": " << rate
        << ", \"exact_dominates\": " << (dominated ? "true" : "false")
        << "}\n";
  } else {
    std::cerr << "instances=" << instances.size() << " equal=" << equal
              << " equality_rate=" << rate
              << " exact_dominates=" << (dominated ? "yes" : "no") << "\n";
  }
  if (!dominated)
    throw twdm::InvariantError(
        "exact oracle produced a worse objective than the greedy rule");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TWDM-PON multi-tenant upstream scheduling simulator"};
  app.require_subcommand(1);

  CommonOptions opt;

  auto* run = app.add_subcommand("run", "Simulate one scenario");
  std::string scenario_path, algorithm, preset, distribution;
  double load = -1.0, sla_fraction = -1.0, tuning_us = -1.0;
  int repetitions = 0;
  bool validate = false;
  run->add_option("--scenario", scenario_path, "Scenario JSON file");
  run->add_option("--algorithm", algorithm, "dtwa or swa");
  run->add_option("--channel-config", preset, "8x25, 4x50, or 1x200");
  run->add_option("--load", load, "Offered load fraction (0, 1]");
  run->add_option("--sla-fraction", sla_fraction, "SLA share of the load");
  run->add_option("--tuning-us", tuning_us, "ONU tuning time in microseconds");
  run->add_option("--distribution", distribution,
                  "uniform, poisson, zipf, or pareto");
  run->add_option("--repetitions", repetitions, "Independent repetitions");
  run->add_flag("--validate", validate, "Check constraints every frame");
  add_common(run, opt);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "Sweep JSON file");
  add_common(sweep, opt);

  auto* profile = app.add_subcommand("profile", "Measure merge runtime");
  std::vector<double> capacities;
  profile->add_option("--capacities", capacities,
                      "Total line capacities in Gb/s (default 50 100 200)");
  add_common(profile, opt);

  auto* oracle = app.add_subcommand("oracle-compare",
                                    "Compare greedy vs exact objectives");
  std::vector<std::string> instance_paths;
  int count = 500;
  double threshold = 0.4;
  oracle->add_option("--instance", instance_paths, "Instance file(s)");
  oracle->add_option("--count", count, "Random instances when no file given");
  oracle->add_option("--threshold", threshold, "Breach threshold for flows");
  add_common(oracle, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(opt, scenario_path, algorithm, load, sla_fraction,
                     tuning_us, preset, distribution, repetitions, validate);
    if (sweep->parsed()) return cmd_sweep(opt, sweep_config);
    if (profile->parsed()) return cmd_profile(opt, capacities);
    if (oracle->parsed())
      return cmd_oracle_compare(opt, instance_paths, count, threshold);
  } catch (const twdm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const twdm::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
