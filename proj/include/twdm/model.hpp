#pragma once
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "twdm/errors.hpp"
#include "twdm/time.hpp"

namespace twdm {

// Latency target plus compliance level. breach_threshold is the allowed
// fraction of delayed allocations per flow over the 1 ms window.
struct SlaClass {
  int id = 0;
  Ns max_latency = 0;              // kInfNs for best effort
  double compliance = 1.0;         // in (0, 1] for non-best-effort classes
  double breach_threshold = 0.0;   // 1 - compliance
  bool best_effort = false;
};

using SlaTable = std::map<int, SlaClass>;

SlaClass make_sla(int id, double max_latency_us, double compliance);
SlaClass make_best_effort(int id);

// Breach state is tracked per (tenant, SLA class); best-effort and SLA traffic
// of the same tenant are separate flows.
struct FlowKey {
  int vno_id = 0;
  int sla_id = 0;
  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

using BreachTable = std::map<FlowKey, double>;

// One upstream grant request from a tenant's virtual bandwidth map.
struct Allocation {
  int vno_id = 0;
  int onu_id = 0;
  int sla_id = 0;
  Ns start_time = 0;        // requested start
  Ns size = 0;              // transmission time at the channel line rate
  Ns max_time = -1;         // start_time + SLA latency, set by calc_max_time
  std::uint64_t seq = 0;    // intra-frame sequence number, stable tie-break

  FlowKey flow() const { return {vno_id, sla_id}; }
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// One tenant's per-frame request list.
struct VirtualBMap {
  int vno_id = 0;
  long frame_index = 0;
  std::vector<Allocation> allocations;
};

// One channel's booked time. Bursts are placed first-fit: an idle gap left
// behind a high-priority placement stays available for later, lower-priority
// bursts, so prioritizing a future request never wastes channel time.
class ChannelTimeline {
 public:
  // Earliest t >= ready such that [t, t + duration) is free.
  Ns earliest_fit(Ns ready, Ns duration) const;

  // Marks [t, t + duration) busy; t must come from earliest_fit.
  void occupy(Ns t, Ns duration);

  // Forgets idle gaps ending at or before horizon; no future request can
  // reach them once all start times have passed the horizon.
  void prune(Ns horizon);

  Ns tail_free() const { return tail_; }
  std::size_t gap_count() const { return gaps_.size(); }

 private:
  struct Gap {
    Ns begin;
    Ns end;
  };
  std::vector<Gap> gaps_;  // sorted, disjoint, all strictly before tail_
  Ns tail_ = 0;            // everything from tail_ onward is free
};

constexpr int kUntuned = -1;

struct OnuState {
  int tuned_channel = kUntuned;
  Ns free_time = 0;             // earliest time the ONU transmitter is idle
};

// An allocation bound to a channel and scheduled time.
struct ScheduledAllocation {
  Allocation alloc;
  int channel = 0;
  Ns sched_time = 0;
};

using ChannelSchedule = std::vector<std::vector<ScheduledAllocation>>;

// Sets max_time = start_time + sla.max_latency on every allocation
// (best effort gets the +inf sentinel). Idempotent, order preserving.
// Throws ConfigError when an sla_id does not resolve.
void calc_max_time(std::vector<VirtualBMap>& bmaps, const SlaTable& slas);

inline double flow_breach(const BreachTable& breach, FlowKey flow) {
  auto it = breach.find(flow);
  return it == breach.end() ? 0.0 : it->second;
}

// Canonical priority order shared by both merging algorithms:
// higher flow breach first, then earlier max_time, then smaller size,
// then seq for stability. Equal deadlines (notably best-effort traffic,
// which shares the +inf sentinel) fall back to request order first, so
// deadline-free traffic is merged first-come-first-served.
inline bool compare_alloc(const Allocation& a, const Allocation& b,
                          const BreachTable& breach) {
  double ba = flow_breach(breach, a.flow());
  double bb = flow_breach(breach, b.flow());
  if (ba != bb) return ba > bb;
  return std::tie(a.max_time, a.start_time, a.size, a.seq) <
         std::tie(b.max_time, b.start_time, b.size, b.seq);
}

}  // namespace twdm
