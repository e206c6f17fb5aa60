#pragma once
#include <map>
#include <vector>

#include "twdm/breach.hpp"
#include "twdm/model.hpp"

namespace twdm {

// Partitions allocations by each ONU's fixed channel. The allocation
// multiset is preserved; an unmapped onu_id is a configuration error.
std::vector<std::vector<Allocation>> partition_by_channel(
    const std::vector<VirtualBMap>& bmaps,
    const std::map<int, int>& onu_channel_map, int n_channels);

// Static wavelength allocation: ONUs never retune. Per channel the same
// breach-aware comparator orders the allocations, then times are assigned
// greedily on that channel alone. The schedule is invariant under tuning time.
class SwaScheduler {
 public:
  SwaScheduler(int n_channels, std::map<int, int> onu_channel_map,
               Ns guard_time = kGuardNs);

  // Round-robin onu_id -> onu_id % n_channels.
  static std::map<int, int> round_robin_map(int n_onus, int n_channels);

  ChannelSchedule run_frame(std::vector<VirtualBMap> bmaps,
                            const SlaTable& slas, BreachTracker& tracker);

  std::vector<Ns> channel_free_times() const;

 private:
  int n_channels_;
  Ns guard_time_;
  std::map<int, int> onu_channel_map_;
  std::vector<ChannelTimeline> channels_;
  std::map<int, Ns> onu_free_;
};

}  // namespace twdm
