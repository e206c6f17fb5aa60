#pragma once
#include <cstdint>
#include <random>
#include <vector>

#include "twdm/model.hpp"

namespace twdm {

enum class Distribution { kUniform, kPoisson, kZipfMandelbrot, kPareto };

const char* distribution_name(Distribution d);
Distribution distribution_from_name(const std::string& name);

struct TrafficConfig {
  Distribution distribution = Distribution::kUniform;
  int arrival_range_au = 20;
  double poisson_lambda = 10.0;
  double zipf_s = 2.0;
  double pareto_alpha = 1.0;
  // Burst bounds are transmission durations on one channel.
  Ns min_burst = 840;       // guard / 0.25
  Ns max_burst = 7'000;     // guard / 0.03
  Ns guard_time = kGuardNs;
  double load_fraction = 0.5;   // of total upstream capacity
  double sla_fraction = 0.5;    // share of load carrying SLA classes
  std::uint64_t seed = 1;

  void validate() const;
};

// Inter-arrival offsets in allocation units, drawn from the configured
// distribution with its CDF renormalized onto [0, arrival_range_au] so
// samples outside the range are impossible.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(const TrafficConfig& cfg);

  double sample(std::mt19937_64& rng) const;   // in AU
  double mean() const { return mean_; }        // analytic truncated mean

  // Probability of each of the 20 equal-width bins over the support
  // (categories for the discrete distributions). For goodness-of-fit tests.
  std::vector<double> bin_probabilities() const;
  int bin_of(double sample) const;

 private:
  Distribution dist_;
  int range_;
  double mean_ = 0.0;
  std::vector<double> cdf_;     // discrete distributions: cumulative pmf
  double pareto_alpha_ = 1.0;
  double pareto_cdf_total_ = 0; // continuous Pareto: truncation normalizer
};

struct Topology {
  int n_vnos = 5;
  std::vector<int> vno_of_onu;  // one VNO per ONU

  // 64 ONUs over 5 VNOs (13,13,13,13,12), assignment shuffled by seed.
  static Topology standard(std::uint64_t seed);
};

struct ChannelPlan {
  int n_channels = 8;
  double line_rate_gbps = 25.0;
  double aggregate_gbps() const { return n_channels * line_rate_gbps; }
};

// Seeded per-frame bandwidth-map generation. Each SLA ONU issues a chain
// of bursts per frame starting at a phase slot stratified over the polling
// window; inter-arrival offsets are sampled in allocation units and
// stretched so the mean stride spreads an ONU's demand over that window.
// Best-effort ONUs are permanently backlogged from the frame start. The
// per-frame capacity budget, modulated per wavelength group, makes offered
// demand track the configured load.
class TrafficGenerator {
 public:
  TrafficGenerator(TrafficConfig cfg, Topology topology, ChannelPlan plan,
                   std::vector<int> sla_class_ids, int best_effort_id);

  // One VirtualBMap per VNO; allocations carry absolute times.
  std::vector<VirtualBMap> generate_frame(long frame_index);

  Ns sample_burst();                 // duration at the plan's line rate
  double sample_arrival_au();        // raw offset in AU

  const TrafficConfig& config() const { return cfg_; }
  double gap_scale_ns_per_au() const { return gap_scale_; }
  Ns frame_budget() const { return budget_; }

 private:
  TrafficConfig cfg_;
  Topology topology_;
  ChannelPlan plan_;
  std::vector<int> sla_ids_;
  int best_effort_id_;
  ArrivalSampler arrivals_;
  std::mt19937_64 rng_;
  std::vector<Ns> onu_cursor_;       // absolute per-ONU burst-train position
  std::vector<int> onu_class_;       // per-ONU SLA class (or best effort)
  Ns budget_ = 0;                    // transmission time per frame at line rate
  double gap_scale_ = 0.0;           // ns per AU of raw arrival offset
};

}  // namespace twdm
