#include "twdm/swa.hpp"

#include <algorithm>
#include <string>

namespace twdm {

std::vector<std::vector<Allocation>> partition_by_channel(
    const std::vector<VirtualBMap>& bmaps,
    const std::map<int, int>& onu_channel_map, int n_channels) {
  std::vector<std::vector<Allocation>> per_channel(n_channels);
  for (const auto& bmap : bmaps) {
    for (const auto& a : bmap.allocations) {
      auto it = onu_channel_map.find(a.onu_id);
      if (it == onu_channel_map.end())
        throw ConfigError("SWA: onu_id " + std::to_string(a.onu_id) +
                          " has no fixed channel");
      if (it->second < 0 || it->second >= n_channels)
        throw ConfigError("SWA: onu_id " + std::to_string(a.onu_id) +
                          " mapped to invalid channel " +
                          std::to_string(it->second));
      per_channel[it->second].push_back(a);
    }
  }
  return per_channel;
}

std::map<int, int> SwaScheduler::round_robin_map(int n_onus, int n_channels) {
  std::map<int, int> map;
  for (int onu = 0; onu < n_onus; ++onu) map[onu] = onu % n_channels;
  return map;
}

SwaScheduler::SwaScheduler(int n_channels, std::map<int, int> onu_channel_map,
                           Ns guard_time)
    : n_channels_(n_channels),
      guard_time_(guard_time),
      onu_channel_map_(std::move(onu_channel_map)) {
  if (n_channels_ < 1) throw ConfigError("SWA requires at least one channel");
  channels_.resize(n_channels_);
}

std::vector<Ns> SwaScheduler::channel_free_times() const {
  std::vector<Ns> free;
  free.reserve(channels_.size());
  for (const auto& ch : channels_) free.push_back(ch.tail_free());
  return free;
}

ChannelSchedule SwaScheduler::run_frame(std::vector<VirtualBMap> bmaps,
                                        const SlaTable& slas,
                                        BreachTracker& tracker) {
  calc_max_time(bmaps, slas);
  if (!bmaps.empty()) {
    Ns frame_start = bmaps.front().frame_index * kFrameNs;
    for (auto& ch : channels_) ch.prune(frame_start);
  }
  auto per_channel =
      partition_by_channel(bmaps, onu_channel_map_, n_channels_);

  const BreachTable& breach = tracker.fractions();
  ChannelSchedule scheduled(n_channels_);
  for (int k = 0; k < n_channels_; ++k) {
    auto& allocs = per_channel[k];
    std::stable_sort(allocs.begin(), allocs.end(),
                     [&breach](const Allocation& a, const Allocation& b) {
                       return compare_alloc(a, b, breach);
                     });
    for (const Allocation& a : allocs) {
      // ONU free time is kept even though each ONU lives on one channel, so
      // the W=1 schedule matches DTWA exactly.
      Ns& onu_free = onu_free_[a.onu_id];
      Ns duration = a.size + guard_time_;
      Ns sched =
          channels_[k].earliest_fit(std::max(onu_free, a.start_time), duration);
      channels_[k].occupy(sched, duration);
      onu_free = sched + duration;
      scheduled[k].push_back({a, k, sched});
    }
  }
  tracker.observe_frame(scheduled);
  return scheduled;
}

}  // namespace twdm
