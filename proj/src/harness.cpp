#include "twdm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "twdm/dtwa.hpp"
#include "twdm/swa.hpp"
#include "twdm/validate.hpp"

namespace twdm {

using nlohmann::json;

const char* algorithm_name(Algorithm a) {
  return a == Algorithm::kDtwa ? "dtwa" : "swa";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "dtwa") return Algorithm::kDtwa;
  if (name == "swa") return Algorithm::kSwa;
  throw ConfigError("unknown algorithm '" + name + "' (expected dtwa or swa)");
}

SlaTable standard_sla_table() {
  SlaTable table;
  table[kSlaClassA] = make_sla(kSlaClassA, 12.5, 0.90);
  table[kSlaClassB] = make_sla(kSlaClassB, 25.0, 0.95);
  table[kBestEffortClass] = make_best_effort(kBestEffortClass);
  return table;
}

void Scenario::check() const {
  if (channels < 1) throw ConfigError("scenario field 'channels' must be >= 1");
  if (line_rate_gbps <= 0.0)
    throw ConfigError("scenario field 'line_rate_gbps' must be positive");
  if (tuning_us < 0.0)
    throw ConfigError("scenario field 'tuning_us' must be non-negative");
  if (load <= 0.0 || load > 1.0)
    throw ConfigError("scenario field 'load' must lie in (0, 1]");
  if (sla_fraction < 0.0 || sla_fraction > 1.0)
    throw ConfigError("scenario field 'sla_fraction' must lie in [0, 1]");
  if (frames < 0) throw ConfigError("scenario field 'frames' must be >= 0");
  if (repetitions < 1)
    throw ConfigError("scenario field 'repetitions' must be >= 1");
}

std::string Scenario::make_id() const {
  std::ostringstream out;
  out << channels << "x" << line_rate_gbps << "G"
      << "_t" << tuning_us << "us"
      << "_l" << load << "_s" << sla_fraction << "_"
      << distribution_name(distribution) << "_" << algorithm_name(algorithm);
  return out.str();
}

void apply_channel_preset(Scenario& s, const std::string& preset) {
  if (preset == "8x25") {
    s.channels = 8;
    s.line_rate_gbps = 25.0;
  } else if (preset == "4x50") {
    s.channels = 4;
    s.line_rate_gbps = 50.0;
  } else if (preset == "1x200") {
    s.channels = 1;
    s.line_rate_gbps = 200.0;
  } else {
    throw ConfigError("unknown channel_config '" + preset +
                      "' (expected 8x25, 4x50, or 1x200)");
  }
}

namespace {

Scenario scenario_from_json(const json& j) {
  Scenario s;
  static const std::vector<std::string> known = {
      "id", "channel_config", "channels", "line_rate_gbps", "tuning_us",
      "load", "sla_fraction", "distribution", "poisson_lambda", "zipf_s",
      "pareto_alpha", "algorithm", "frames", "seed", "repetitions",
      "validate", "onu_channel_map"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown scenario field '" + key + "'");
  try {
    if (j.contains("channel_config"))
      apply_channel_preset(s, j.at("channel_config").get<std::string>());
    if (j.contains("channels")) s.channels = j.at("channels").get<int>();
    if (j.contains("line_rate_gbps"))
      s.line_rate_gbps = j.at("line_rate_gbps").get<double>();
    if (j.contains("tuning_us")) s.tuning_us = j.at("tuning_us").get<double>();
    if (j.contains("load")) s.load = j.at("load").get<double>();
    if (j.contains("sla_fraction"))
      s.sla_fraction = j.at("sla_fraction").get<double>();
    if (j.contains("distribution"))
      s.distribution =
          distribution_from_name(j.at("distribution").get<std::string>());
    if (j.contains("poisson_lambda"))
      s.poisson_lambda = j.at("poisson_lambda").get<double>();
    if (j.contains("zipf_s")) s.zipf_s = j.at("zipf_s").get<double>();
    if (j.contains("pareto_alpha"))
      s.pareto_alpha = j.at("pareto_alpha").get<double>();
    if (j.contains("algorithm"))
      s.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    if (j.contains("frames")) s.frames = j.at("frames").get<long>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("repetitions"))
      s.repetitions = j.at("repetitions").get<int>();
    if (j.contains("validate")) s.validate = j.at("validate").get<bool>();
    if (j.contains("onu_channel_map")) {
      std::map<int, int> map;
      for (const auto& [key, value] : j.at("onu_channel_map").items())
        map[std::stoi(key)] = value.get<int>();
      s.onu_channel_map = std::move(map);
    }
    if (j.contains("id")) s.id = j.at("id").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  if (s.id.empty()) s.id = s.make_id();
  s.check();
  return s;
}

json parse_json_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
  return scenario_from_json(parse_json_text(text, "scenario file"));
}

Scenario Scenario::from_json_file(const std::string& path) {
  return from_json_text(slurp(path));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}
}  // namespace

double interquartile_range(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return quantile(values, 0.75) - quantile(values, 0.25);
}

RunResult run_scenario(const Scenario& s) {
  s.check();
  RunResult result;
  result.scenario_id = s.id.empty() ? s.make_id() : s.id;
  SlaTable slas = standard_sla_table();

  std::uint64_t checksum = 1469598103934665603ULL;  // FNV offset basis
  auto fold = [&checksum](std::uint64_t v) {
    checksum ^= v;
    checksum *= 1099511628211ULL;
  };

  for (int rep = 0; rep < s.repetitions; ++rep) {
    std::uint64_t rep_seed = s.seed + static_cast<std::uint64_t>(rep);

    TrafficConfig traffic;
    traffic.distribution = s.distribution;
    traffic.poisson_lambda = s.poisson_lambda;
    traffic.zipf_s = s.zipf_s;
    traffic.pareto_alpha = s.pareto_alpha;
    traffic.load_fraction = s.load;
    traffic.sla_fraction = s.sla_fraction;
    traffic.seed = rep_seed;

    Topology topology = Topology::standard(rep_seed);
    ChannelPlan plan{s.channels, s.line_rate_gbps};
    TrafficGenerator generator(traffic, topology, plan,
                               {kSlaClassA, kSlaClassB}, kBestEffortClass);
    BreachTracker tracker(slas);
    ScheduleValidator validator(s.channels, us_to_ns(s.tuning_us));

    DtwaConfig dtwa_cfg{s.channels, us_to_ns(s.tuning_us), kGuardNs,
                        s.line_rate_gbps};
    DtwaScheduler dtwa(dtwa_cfg);
    SwaScheduler swa(
        s.channels,
        s.onu_channel_map.value_or(SwaScheduler::round_robin_map(
            static_cast<int>(topology.vno_of_onu.size()), s.channels)),
        kGuardNs);

    std::vector<Ns> prev_free(s.channels, 0);
    std::vector<std::string> violations;
    for (long frame = 0; frame < s.frames; ++frame) {
      auto bmaps = generator.generate_frame(frame);

      auto t0 = std::chrono::steady_clock::now();
      ChannelSchedule scheduled =
          s.algorithm == Algorithm::kDtwa ? dtwa.run_frame(bmaps, slas, tracker)
                                          : swa.run_frame(bmaps, slas, tracker);
      auto t1 = std::chrono::steady_clock::now();
      result.merge_runtime_us.push_back(
          std::chrono::duration<double, std::micro>(t1 - t0).count());

      // State continuity: the same state tables serve every frame, so
      // channel free times may never move backwards.
      const auto& free = s.algorithm == Algorithm::kDtwa
                             ? dtwa.channel_free_times()
                             : swa.channel_free_times();
      for (int k = 0; k < s.channels; ++k) {
        if (free[k] < prev_free[k])
          throw InvariantError("channel free time moved backwards on channel " +
                               std::to_string(k));
        prev_free[k] = free[k];
      }

      for (const auto& channel : scheduled)
        for (const auto& sched : channel) {
          fold(static_cast<std::uint64_t>(sched.sched_time));
          fold(static_cast<std::uint64_t>(sched.channel));
          fold(sched.alloc.seq);
        }

      if (s.validate) validator.check_frame(bmaps, scheduled, violations);
    }

    result.per_rep_compliance.push_back(tracker.compliance());
    result.breach_events += tracker.total_breach_events();
    result.window_samples += tracker.window_samples();
    result.breached_samples += tracker.breached_samples();
    result.violations += static_cast<long>(violations.size());
  }

  result.state_checksum = checksum;
  const auto& c = result.per_rep_compliance;
  result.compliance_mean =
      c.empty() ? 1.0 : std::accumulate(c.begin(), c.end(), 0.0) / c.size();
  if (c.size() > 1) {
    double ss = 0.0;
    for (double v : c) ss += (v - result.compliance_mean) *
                             (v - result.compliance_mean);
    result.compliance_stddev = std::sqrt(ss / (c.size() - 1));
  }
  result.runtime_median_us = median(result.merge_runtime_us);
  result.runtime_iqr_us = interquartile_range(result.merge_runtime_us);
  return result;
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  json j = parse_json_text(text, "sweep config");
  SweepConfig cfg;
  static const std::vector<std::string> known = {
      "channel_configs", "tuning_us", "loads", "sla_fractions",
      "distributions", "algorithms", "frames", "seed", "repetitions"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown sweep field '" + key + "'");
  try {
    if (j.contains("channel_configs"))
      cfg.channel_configs = j.at("channel_configs").get<std::vector<std::string>>();
    if (j.contains("tuning_us"))
      cfg.tuning_us = j.at("tuning_us").get<std::vector<double>>();
    if (j.contains("loads")) cfg.loads = j.at("loads").get<std::vector<double>>();
    if (j.contains("sla_fractions"))
      cfg.sla_fractions = j.at("sla_fractions").get<std::vector<double>>();
    if (j.contains("distributions"))
      cfg.distributions = j.at("distributions").get<std::vector<std::string>>();
    if (j.contains("algorithms"))
      cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("frames")) cfg.frames = j.at("frames").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("repetitions"))
      cfg.repetitions = j.at("repetitions").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config parse error: ") + e.what());
  }
  return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
  return from_json_text(slurp(path));
}

std::vector<Scenario> SweepConfig::expand() const {
  std::vector<Scenario> cells;
  for (const auto& preset : channel_configs)
    for (double tuning : tuning_us)
      for (double load : loads)
        for (double sla : sla_fractions)
          for (const auto& dist : distributions)
            for (const auto& algo : algorithms) {
              Scenario s;
              apply_channel_preset(s, preset);
              s.tuning_us = tuning;
              s.load = load;
              s.sla_fraction = sla;
              s.distribution = distribution_from_name(dist);
              s.algorithm = algorithm_from_name(algo);
              s.frames = frames;
              s.seed = seed;
              s.repetitions = repetitions;
              s.id = s.make_id();
              cells.push_back(s);
            }
  return cells;
}

std::vector<RunResult> run_sweep(const SweepConfig& cfg) {
  std::vector<RunResult> results;
  for (const Scenario& s : cfg.expand()) results.push_back(run_scenario(s));
  return results;
}

std::vector<ProfileRow> profile_runtime(const std::vector<double>& capacities,
                                        long frames, std::uint64_t seed) {
  std::vector<ProfileRow> rows;
  for (double capacity : capacities) {
    if (capacity <= 0.0)
      throw ConfigError("profile capacities must be positive");
    for (Algorithm algo : {Algorithm::kDtwa, Algorithm::kSwa}) {
      Scenario s;
      s.channels = std::max(1, static_cast<int>(capacity / 25.0 + 0.5));
      s.line_rate_gbps = 25.0;
      s.load = 0.8;
      s.sla_fraction = 0.5;
      s.tuning_us = 0.25;
      s.algorithm = algo;
      s.frames = frames;
      s.seed = seed;
      s.id = s.make_id();
      RunResult r = run_scenario(s);
      rows.push_back({capacity, algo, frames, r.runtime_median_us,
                      r.runtime_iqr_us});
    }
  }
  return rows;
}

namespace {
constexpr const char* kSchemaVersion = "twdm-v1";
}

void write_sweep_csv(std::ostream& out, const std::vector<Scenario>& cells,
                     const std::vector<RunResult>& results) {
  out << "schema_version,scenario_id,channels,line_rate_gbps,tuning_us,load,"
         "sla_fraction,distribution,algorithm,frames,seed,repetitions,"
         "compliance_mean,compliance_stddev,breach_events,window_samples,"
         "breached_samples,runtime_median_us,runtime_iqr_us\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Scenario& s = cells[i];
    const RunResult& r = results[i];
    out << kSchemaVersion << ',' << r.scenario_id << ',' << s.channels << ','
        << s.line_rate_gbps << ',' << s.tuning_us << ',' << s.load << ','
        << s.sla_fraction << ',' << distribution_name(s.distribution) << ','
        << algorithm_name(s.algorithm) << ',' << s.frames << ',' << s.seed
        << ',' << s.repetitions << ',' << r.compliance_mean << ','
        << r.compliance_stddev << ',' << r.breach_events << ','
        << r.window_samples << ',' << r.breached_samples << ','
        << r.runtime_median_us << ',' << r.runtime_iqr_us << '\n';
  }
}

void write_run_json(std::ostream& out, const Scenario& s, const RunResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = {
      {"id", r.scenario_id},
      {"channels", s.channels},
      {"line_rate_gbps", s.line_rate_gbps},
      {"tuning_us", s.tuning_us},
      {"load", s.load},
      {"sla_fraction", s.sla_fraction},
      {"distribution", distribution_name(s.distribution)},
      {"algorithm", algorithm_name(s.algorithm)},
      {"frames", s.frames},
      {"seed", s.seed},
      {"repetitions", s.repetitions},
  };
  j["compliance_mean"] = r.compliance_mean;
  j["compliance_stddev"] = r.compliance_stddev;
  j["per_rep_compliance"] = r.per_rep_compliance;
  j["breach_events"] = r.breach_events;
  j["window_samples"] = r.window_samples;
  j["breached_samples"] = r.breached_samples;
  j["violations"] = r.violations;
  j["state_checksum"] = r.state_checksum;
  j["runtime_median_us"] = r.runtime_median_us;
  j["runtime_iqr_us"] = r.runtime_iqr_us;
  out << j.dump(2) << '\n';
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows) {
  out << "schema_version,capacity_gbps,algorithm,frames,median_us,iqr_us\n";
  for (const auto& row : rows)
    out << kSchemaVersion << ',' << row.capacity_gbps << ','
        << algorithm_name(row.algorithm) << ',' << row.frames << ','
        << row.median_us << ',' << row.iqr_us << '\n';
}

}  // namespace twdm
