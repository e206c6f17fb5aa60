#pragma once
#include <map>
#include <vector>

#include "twdm/breach.hpp"
#include "twdm/model.hpp"

namespace twdm {

struct DtwaConfig {
  int n_channels = 1;
  Ns tuning_time = 0;
  Ns guard_time = kGuardNs;   // appended after every scheduled burst
  double line_rate_gbps = 25.0;
};

// Flattens all maps and sorts by the canonical priority comparator.
// Input maps are not modified.
std::vector<Allocation> sort_bmaps(const std::vector<VirtualBMap>& bmaps,
                                   const BreachTable& breach);

// Channel with the earliest free_time (timeline tail); ties go to the
// channel with fewest allocations this frame, then the lowest index.
int find_min_index(const std::vector<Ns>& free_times,
                   const std::vector<int>& alloc_counts);

// Dynamic time and wavelength allocation. One instance owns its channel and
// ONU state tables; frames must be run sequentially against the same instance.
class DtwaScheduler {
 public:
  explicit DtwaScheduler(DtwaConfig cfg);

  // Greedy (channel, time) assignment for an already sorted allocation list.
  // For each allocation the scheduler either stays on the ONU's tuned channel
  // or switches to the earliest-free channel, whichever transmits sooner;
  // switching a tuned ONU pays the tuning time, a first-ever grant does not.
  ChannelSchedule assign_resource(const std::vector<Allocation>& sorted);

  // One 125 us frame: max-time computation, breach-aware sort, resource
  // assignment, breach-state update. Returns the per-channel merged maps.
  ChannelSchedule run_frame(std::vector<VirtualBMap> bmaps,
                            const SlaTable& slas, BreachTracker& tracker);

  std::vector<Ns> channel_free_times() const;
  const std::map<int, OnuState>& onu_states() const { return onus_; }
  const DtwaConfig& config() const { return cfg_; }

 private:
  DtwaConfig cfg_;
  std::vector<ChannelTimeline> channels_;
  std::vector<int> alloc_count_;  // per channel, this frame, tie-break only
  Ns frame_start_ = 0;            // floor for retune decisions this frame
  std::map<int, OnuState> onus_;
};

}  // namespace twdm
