#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twdm/traffic.hpp"

namespace twdm {

enum class Algorithm { kDtwa, kSwa };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// One experiment cell: a channel configuration, tuning time, load, SLA
// fraction, arrival distribution, and algorithm, run for a frame count.
struct Scenario {
  std::string id;
  int channels = 8;
  double line_rate_gbps = 25.0;
  double tuning_us = 0.0;
  double load = 0.5;
  double sla_fraction = 0.5;
  Distribution distribution = Distribution::kUniform;
  double poisson_lambda = 10.0;
  double zipf_s = 2.0;
  double pareto_alpha = 1.0;
  Algorithm algorithm = Algorithm::kDtwa;
  long frames = 1000;
  std::uint64_t seed = 1;
  int repetitions = 1;
  bool validate = false;   // run the constraint validator every frame
  std::optional<std::map<int, int>> onu_channel_map;  // SWA override

  void check() const;  // ConfigError naming the offending field
  static Scenario from_json_file(const std::string& path);
  static Scenario from_json_text(const std::string& text);
  std::string make_id() const;
};

// Applies one of the paper's channel presets (8x25G, 4x50G, 1x200G).
void apply_channel_preset(Scenario& s, const std::string& preset);

struct RunResult {
  std::string scenario_id;
  std::vector<double> per_rep_compliance;
  double compliance_mean = 1.0;
  double compliance_stddev = 0.0;
  long breach_events = 0;
  long window_samples = 0;
  long breached_samples = 0;
  long violations = 0;           // populated when Scenario::validate is set
  std::uint64_t state_checksum = 0;  // deterministic digest of the schedule
  std::vector<double> merge_runtime_us;  // one sample per frame per repetition
  double runtime_median_us = 0.0;
  double runtime_iqr_us = 0.0;
};

// The paper's two SLA classes plus best effort: 12.5 us at 90% compliance,
// 25 us at 95%, classes alternated across SLA traffic.
SlaTable standard_sla_table();
constexpr int kSlaClassA = 0;
constexpr int kSlaClassB = 1;
constexpr int kBestEffortClass = 2;

RunResult run_scenario(const Scenario& s);

// Cartesian sweep configuration; every axis with several values multiplies
// the number of cells. Stable row order.
struct SweepConfig {
  std::vector<std::string> channel_configs{"8x25"};
  std::vector<double> tuning_us{0.0};
  std::vector<double> loads{0.5};
  std::vector<double> sla_fractions{0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::string> distributions{"uniform"};
  std::vector<std::string> algorithms{"dtwa"};
  long frames = 1000;
  std::uint64_t seed = 1;
  int repetitions = 1;

  static SweepConfig from_json_file(const std::string& path);
  static SweepConfig from_json_text(const std::string& text);
  std::vector<Scenario> expand() const;
};

std::vector<RunResult> run_sweep(const SweepConfig& cfg);

struct ProfileRow {
  double capacity_gbps = 0.0;
  Algorithm algorithm = Algorithm::kDtwa;
  long frames = 0;
  double median_us = 0.0;
  double iqr_us = 0.0;
};

// Per-frame merge wall time (generation and I/O excluded) for both
// algorithms across total line capacities, as W x 25G channel plans.
std::vector<ProfileRow> profile_runtime(const std::vector<double>& capacities,
                                        long frames, std::uint64_t seed);

// Tabular export. CSV rows carry a schema_version column.
void write_sweep_csv(std::ostream& out, const std::vector<Scenario>& cells,
                     const std::vector<RunResult>& results);
void write_run_json(std::ostream& out, const Scenario& s, const RunResult& r);
void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows);

double median(std::vector<double> values);
double interquartile_range(std::vector<double> values);

}  // namespace twdm
