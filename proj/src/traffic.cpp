#include "twdm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace twdm {

namespace {
// Fraction of the frame over which SLA request chains are phased. DBA
// polling concentrates grant requests in the early part of the cycle; the
// tail of the frame is left to best-effort backfill. Compressing the timed
// demand into a sub-frame window is what lets high SLA shares overload
// their window at high load while best-effort traffic still keeps the
// channels busy.
constexpr double kPhaseSpanFrac = 0.7;

// Strength of the frame-to-frame demand fluctuation applied per wavelength
// group: each group's budget share is scaled by 1 - k + k * X / E[X] with
// X drawn from the arrival distribution.
constexpr double kLoadVariation = 0.2;
}  // namespace

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::kUniform: return "uniform";
    case Distribution::kPoisson: return "poisson";
    case Distribution::kZipfMandelbrot: return "zipf_mandelbrot";
    case Distribution::kPareto: return "pareto";
  }
  return "unknown";
}

Distribution distribution_from_name(const std::string& name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "poisson") return Distribution::kPoisson;
  if (name == "zipf_mandelbrot" || name == "zipf")
    return Distribution::kZipfMandelbrot;
  if (name == "pareto") return Distribution::kPareto;
  throw ConfigError("unknown arrival distribution '" + name + "'");
}

void TrafficConfig::validate() const {
  if (arrival_range_au < 1)
    throw ConfigError("arrival_range_au must be at least 1");
  if (distribution == Distribution::kPoisson && poisson_lambda <= 0.0)
    throw ConfigError("poisson_lambda must be positive");
  if (distribution == Distribution::kZipfMandelbrot && zipf_s <= 1.0)
    throw ConfigError("zipf_s must exceed 1");
  if (distribution == Distribution::kPareto && pareto_alpha <= 0.0)
    throw ConfigError("pareto_alpha must be positive");
  if (min_burst <= 0 || max_burst < min_burst)
    throw ConfigError("burst bounds must satisfy 0 < min_burst <= max_burst");
  if (guard_time < 0) throw ConfigError("guard_time must be non-negative");
  if (load_fraction <= 0.0 || load_fraction > 1.0)
    throw ConfigError("load_fraction must lie in (0, 1]");
  if (sla_fraction < 0.0 || sla_fraction > 1.0)
    throw ConfigError("sla_fraction must lie in [0, 1]");
}

ArrivalSampler::ArrivalSampler(const TrafficConfig& cfg)
    : dist_(cfg.distribution), range_(cfg.arrival_range_au) {
  cfg.validate();
  switch (dist_) {
    case Distribution::kUniform:
      mean_ = range_ / 2.0;
      break;
    case Distribution::kPoisson: {
      // pmf over {0..range}, renormalized.
      std::vector<double> pmf(range_ + 1);
      double log_lambda = std::log(cfg.poisson_lambda);
      double log_fact = 0.0;
      for (int k = 0; k <= range_; ++k) {
        if (k > 0) log_fact += std::log(static_cast<double>(k));
        pmf[k] = std::exp(-cfg.poisson_lambda + k * log_lambda - log_fact);
      }
      double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
      cdf_.resize(pmf.size());
      double acc = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        mean_ += k * pmf[k] / total;
        acc += pmf[k] / total;
        cdf_[k] = acc;
      }
      break;
    }
    case Distribution::kZipfMandelbrot: {
      // q = 0 (pure Zipf), pmf over {1..range} proportional to k^-s.
      std::vector<double> pmf(range_);
      for (int k = 1; k <= range_; ++k)
        pmf[k - 1] = std::pow(static_cast<double>(k), -cfg.zipf_s);
      double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
      cdf_.resize(pmf.size());
      double acc = 0.0;
      for (int k = 1; k <= range_; ++k) {
        mean_ += k * pmf[k - 1] / total;
        acc += pmf[k - 1] / total;
        cdf_[k - 1] = acc;
      }
      break;
    }
    case Distribution::kPareto: {
      // Scale 1, truncated CDF renormalized onto [1, range].
      double a = pareto_alpha_ = cfg.pareto_alpha;
      pareto_cdf_total_ = 1.0 - std::pow(static_cast<double>(range_), -a);
      if (a == 1.0) {
        mean_ = std::log(static_cast<double>(range_)) / pareto_cdf_total_;
      } else {
        mean_ = a / (a - 1.0) *
                (1.0 - std::pow(static_cast<double>(range_), 1.0 - a)) /
                pareto_cdf_total_;
      }
      break;
    }
  }
}

double ArrivalSampler::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  switch (dist_) {
    case Distribution::kUniform:
      return u * range_;
    case Distribution::kPoisson: {
      auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      return static_cast<double>(it - cdf_.begin());
    }
    case Distribution::kZipfMandelbrot: {
      auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      return static_cast<double>(it - cdf_.begin()) + 1.0;
    }
    case Distribution::kPareto:
      // Inverse of the truncated CDF.
      return std::pow(1.0 - u * pareto_cdf_total_, -1.0 / pareto_alpha_);
  }
  return 0.0;
}

std::vector<double> ArrivalSampler::bin_probabilities() const {
  switch (dist_) {
    case Distribution::kUniform:
      return std::vector<double>(20, 1.0 / 20.0);
    case Distribution::kPoisson:
    case Distribution::kZipfMandelbrot: {
      std::vector<double> probs(cdf_.size());
      double prev = 0.0;
      for (std::size_t i = 0; i < cdf_.size(); ++i) {
        probs[i] = cdf_[i] - prev;
        prev = cdf_[i];
      }
      return probs;
    }
    case Distribution::kPareto: {
      double a = pareto_alpha_;
      std::vector<double> probs(20);
      double width = (range_ - 1.0) / 20.0;
      double prev = 0.0;
      for (int i = 0; i < 20; ++i) {
        double edge = 1.0 + (i + 1) * width;
        double f = (1.0 - std::pow(edge, -a)) / pareto_cdf_total_;
        probs[i] = f - prev;
        prev = f;
      }
      return probs;
    }
  }
  return {};
}

int ArrivalSampler::bin_of(double sample) const {
  switch (dist_) {
    case Distribution::kUniform:
      return std::min(19, static_cast<int>(sample / range_ * 20.0));
    case Distribution::kPoisson:
      return static_cast<int>(sample);
    case Distribution::kZipfMandelbrot:
      return static_cast<int>(sample) - 1;
    case Distribution::kPareto: {
      double width = (range_ - 1.0) / 20.0;
      return std::min(19, static_cast<int>((sample - 1.0) / width));
    }
  }
  return 0;
}

Topology Topology::standard(std::uint64_t seed) {
  Topology t;
  t.n_vnos = 5;
  // 64 ONUs: four VNOs with 13, one with 12, assignment shuffled by seed.
  for (int vno = 0; vno < 5; ++vno) {
    int count = vno == 4 ? 12 : 13;
    for (int i = 0; i < count; ++i) t.vno_of_onu.push_back(vno);
  }
  std::mt19937_64 rng(seed ^ 0x746f706f6c6f6779ULL);
  std::shuffle(t.vno_of_onu.begin(), t.vno_of_onu.end(), rng);
  return t;
}

TrafficGenerator::TrafficGenerator(TrafficConfig cfg, Topology topology,
                                   ChannelPlan plan,
                                   std::vector<int> sla_class_ids,
                                   int best_effort_id)
    : cfg_(cfg),
      topology_(std::move(topology)),
      plan_(plan),
      sla_ids_(std::move(sla_class_ids)),
      best_effort_id_(best_effort_id),
      arrivals_(cfg),
      rng_(cfg.seed) {
  cfg_.validate();
  if (plan_.n_channels < 1 || plan_.line_rate_gbps <= 0.0)
    throw ConfigError("channel plan must have >= 1 channel at a positive rate");
  if (topology_.vno_of_onu.empty())
    throw ConfigError("topology assigns no ONUs");
  if (sla_ids_.empty()) throw ConfigError("at least one SLA class id required");

  onu_cursor_.assign(topology_.vno_of_onu.size(), 0);
  budget_ = static_cast<Ns>(cfg_.load_fraction * plan_.n_channels * kFrameNs);

  // SLA membership is a per-ONU property (an ONU belongs to a service tier;
  // its bursts are all SLA-bound or all best-effort). Mixing tiers within
  // one ONU would let best-effort bursts head-of-line block SLA bursts of
  // the same ONU through transmitter serialization. SLA ONUs are provisioned
  // evenly across the wavelength groups (onu mod W) and across the tenants,
  // mirroring how an operator spreads premium endpoints over channels; the
  // residual choice within each group is a seeded shuffle.
  std::size_t n_onus = topology_.vno_of_onu.size();
  onu_class_.assign(n_onus, best_effort_id_);
  std::vector<std::vector<int>> groups(plan_.n_channels);
  for (std::size_t onu = 0; onu < n_onus; ++onu)
    groups[onu % plan_.n_channels].push_back(static_cast<int>(onu));
  for (auto& g : groups) std::shuffle(g.begin(), g.end(), rng_);
  std::vector<int> vno_count(topology_.n_vnos, 0);
  std::size_t n_sla =
      static_cast<std::size_t>(std::llround(cfg_.sla_fraction * n_onus));
  std::size_t taken = 0;
  for (std::size_t round = 0; taken < n_sla; ++round)
    for (auto& g : groups) {
      if (taken >= n_sla || round >= g.size()) continue;
      // Within the group, prefer the tenant with the fewest SLA ONUs so
      // every VNO keeps samples in all of its flows.
      std::size_t pick = round;
      for (std::size_t i = round; i < g.size(); ++i)
        if (vno_count[topology_.vno_of_onu[g[i]]] <
            vno_count[topology_.vno_of_onu[g[pick]]])
          pick = i;
      std::swap(g[round], g[pick]);
      // One SLA class per ONU: an ONU's bursts all belong to one flow, so
      // breach-priority ordering can never starve one of its flows through
      // transmitter serialization against another. Classes alternate along
      // the pick order, keeping the class memberships balanced.
      onu_class_[g[round]] = sla_ids_[taken % sla_ids_.size()];
      ++vno_count[topology_.vno_of_onu[g[round]]];
      ++taken;
    }
  // Arrival offsets are sampled in allocation units and stretched so the
  // expected stride between an ONU's consecutive bursts is one ONU's share
  // of the frame. The stretch is normalized by the distribution's own mean,
  // so every distribution offers the same average spacing and differs only
  // in shape: clustering-heavy shapes (Zipf, Pareto) bunch requests and
  // collide more often than evenly spaced ones (Poisson, uniform).
  double mean_burst =
      0.5 * static_cast<double>(cfg_.min_burst + cfg_.max_burst);
  double bursts_per_onu =
      static_cast<double>(budget_) /
      (static_cast<double>(onu_cursor_.size()) * mean_burst);
  double stride_gap_ns = std::max(
      0.0, kPhaseSpanFrac * kFrameNs / std::max(bursts_per_onu, 1.0) -
               mean_burst - static_cast<double>(cfg_.guard_time));
  gap_scale_ = stride_gap_ns / arrivals_.mean();
}

Ns TrafficGenerator::sample_burst() {
  if (cfg_.min_burst == cfg_.max_burst) return cfg_.min_burst;
  std::uniform_real_distribution<double> burst(
      static_cast<double>(cfg_.min_burst), static_cast<double>(cfg_.max_burst));
  return std::llround(burst(rng_));
}

double TrafficGenerator::sample_arrival_au() { return arrivals_.sample(rng_); }

std::vector<VirtualBMap> TrafficGenerator::generate_frame(long frame_index) {
  std::vector<VirtualBMap> bmaps(topology_.n_vnos);
  for (int vno = 0; vno < topology_.n_vnos; ++vno) {
    bmaps[vno].vno_id = vno;
    bmaps[vno].frame_index = frame_index;
  }

  Ns frame_start = frame_index * kFrameNs;
  // Bursts visit the ONUs round-robin in a fresh shuffled order, so per-ONU
  // burst counts differ by at most one within a frame.
  std::vector<int> onu_order(onu_cursor_.size());
  std::iota(onu_order.begin(), onu_order.end(), 0);
  std::shuffle(onu_order.begin(), onu_order.end(), rng_);

  // Each ONU's bursts form one request chain per frame. Chain start phases
  // are stratified over the frame in visitation order via the van der
  // Corput sequence (plus uniform jitter inside a slot), so ANY prefix of
  // the visitation covers the frame evenly -- important when the budget
  // admits only a fraction of the ONUs per frame. This mirrors the
  // near-periodic request phasing of per-ONU DBA polling. Chains restart at
  // every frame boundary; carrying cursors across frames would let per-ONU
  // backlogs random-walk past the generation horizon.
  Ns phase_span = static_cast<Ns>(kPhaseSpanFrac * kFrameNs);
  Ns phase_stride = phase_span / static_cast<Ns>(onu_cursor_.size());
  std::uniform_int_distribution<Ns> jitter(0, std::max<Ns>(phase_stride, 1) - 1);
  for (std::size_t i = 0; i < onu_order.size(); ++i) {
    double vdc = 0.0, denom = 1.0;
    for (std::size_t j = i; j != 0; j >>= 1) {
      denom *= 2.0;
      if (j & 1) vdc += 1.0 / denom;
    }
    onu_cursor_[onu_order[i]] =
        frame_start + static_cast<Ns>(vdc * phase_span) + jitter(rng_);
    // Best-effort ONUs are modeled as permanently backlogged queues: their
    // data is ready from the frame start and their bursts form compact
    // chains, so the scheduler can drop them into idle capacity anywhere in
    // the frame. Only SLA flows carry timed requests.
    if (onu_class_[onu_order[i]] == best_effort_id_)
      onu_cursor_[onu_order[i]] = frame_start;
  }

  // Offered demand fluctuates frame to frame around the configured load,
  // independently per wavelength group (the ONUs sharing a home channel,
  // onu mod W): each group's budget share is modulated by a factor with
  // mean 1 drawn from the arrival distribution. Multi-channel configs
  // average several independent fluctuations, so their aggregate demand is
  // smoother than a single fat channel carrying one group's full swing --
  // the statistical-multiplexing gain that lets them degrade later under
  // load. Heavy-tailed shapes produce occasional deep-overload frames
  // whose backlog spills into following frames.
  int n_groups = plan_.n_channels;
  std::vector<std::vector<int>> group_onus(n_groups);
  for (int onu : onu_order) group_onus[onu % n_groups].push_back(onu);

  std::uint64_t seq = 0;
  for (int g = 0; g < n_groups; ++g) {
    double factor = 1.0 - kLoadVariation +
                    kLoadVariation * sample_arrival_au() / arrivals_.mean();
    Ns group_budget = static_cast<Ns>(budget_ / n_groups * factor);
    const std::vector<int>& members = group_onus[g];
    Ns total = 0;
    std::size_t rr = 0;
    while (true) {
      Ns size = sample_burst();
      if (total + size > group_budget) break;
      std::size_t visit = rr++;
      int onu = members[visit % members.size()];
      // A chain's first burst sits exactly on the ONU's stratified phase
      // slot; later bursts follow at gaps drawn from the arrival
      // distribution. Chain starts therefore stay contention free at light
      // load, while clustering-heavy distributions bunch the later bursts
      // of a chain and collide.
      Ns gap = 0;
      if (onu_class_[onu] != best_effort_id_ && visit >= members.size())
        gap = std::llround(sample_arrival_au() * gap_scale_);

      // Chains are circular within the frame: positions wrap instead of
      // accumulating past the frame end, so demand mass stays spread over
      // the frame while bursty gap patterns still cluster requests locally.
      Ns offset = (onu_cursor_[onu] + gap - frame_start) % kFrameNs;
      if (offset + size > kFrameNs) offset -= kFrameNs - size;
      Ns start = frame_start + offset;
      if (start > frame_start + 8 * kFrameNs)
        throw ConfigError(
            "load infeasible for frame duration: allocation (onu=" +
            std::to_string(onu) + ", seq=" + std::to_string(seq) +
            ") requests start " + std::to_string(start) +
            " ns, beyond the generation horizon of frame " +
            std::to_string(frame_index));

      Allocation a;
      a.onu_id = onu;
      a.vno_id = topology_.vno_of_onu[onu];
      a.start_time = start;
      a.size = size;
      a.seq = seq++;
      a.sla_id = onu_class_[onu];
      bmaps[a.vno_id].allocations.push_back(a);

      onu_cursor_[onu] = start + size + cfg_.guard_time;
      // The burst's guard interval counts against the budget: offered load
      // is measured in channel occupancy, which each burst consumes as
      // size + guard.
      total += size + cfg_.guard_time;
    }
  }
  return bmaps;
}

}  // namespace twdm
