#include "twdm/dtwa.hpp"

#include <algorithm>

namespace twdm {

std::vector<Allocation> sort_bmaps(const std::vector<VirtualBMap>& bmaps,
                                   const BreachTable& breach) {
  std::vector<Allocation> merged;
  for (const auto& bmap : bmaps)
    merged.insert(merged.end(), bmap.allocations.begin(),
                  bmap.allocations.end());
  std::stable_sort(merged.begin(), merged.end(),
                   [&breach](const Allocation& a, const Allocation& b) {
                     return compare_alloc(a, b, breach);
                   });
  return merged;
}

int find_min_index(const std::vector<Ns>& free_times,
                   const std::vector<int>& alloc_counts) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(free_times.size()); ++k)
    if (free_times[k] < free_times[best] ||
        (free_times[k] == free_times[best] &&
         alloc_counts[k] < alloc_counts[best]))
      best = k;
  return best;
}

DtwaScheduler::DtwaScheduler(DtwaConfig cfg) : cfg_(cfg) {
  if (cfg_.n_channels < 1)
    throw ConfigError("DTWA requires at least one channel");
  if (cfg_.tuning_time < 0 || cfg_.guard_time < 0)
    throw ConfigError("DTWA tuning and guard times must be non-negative");
  channels_.resize(cfg_.n_channels);
  alloc_count_.assign(cfg_.n_channels, 0);
}

std::vector<Ns> DtwaScheduler::channel_free_times() const {
  std::vector<Ns> free;
  free.reserve(channels_.size());
  for (const auto& ch : channels_) free.push_back(ch.tail_free());
  return free;
}

ChannelSchedule DtwaScheduler::assign_resource(
    const std::vector<Allocation>& sorted) {
  // alloc_count ties reset each frame.
  std::fill(alloc_count_.begin(), alloc_count_.end(), 0);
  ChannelSchedule out(cfg_.n_channels);

  for (const Allocation& a : sorted) {
    OnuState& onu = onus_[a.onu_id];
    Ns duration = a.size + cfg_.guard_time;

    std::vector<Ns> free = channel_free_times();
    int channel;
    Ns sched;
    if (onu.tuned_channel == kUntuned) {
      // First ever grant: tuning happened during activation, no penalty;
      // the burst lands on the channel with the earliest free time.
      channel = find_min_index(free, alloc_count_);
      sched = channels_[channel].earliest_fit(
          std::max(onu.free_time, a.start_time), duration);
    } else {
      // Staying backfills the tuned channel's idle gaps. Switching appends
      // at the target channel's frontier (its free_time) and pays the
      // tuning time from the moment the allocation becomes eligible: the
      // transceiver parks on its tuned channel, and retune directives
      // travel with the bandwidth map rather than ahead of it.
      Ns ready_same = std::max(onu.free_time, a.start_time);
      Ns same =
          channels_[onu.tuned_channel].earliest_fit(ready_same, duration);
      Ns retune_from = std::max({onu.free_time, frame_start_, a.start_time});
      int other = find_min_index(free, alloc_count_);
      Ns diff = std::max(free[other], retune_from + cfg_.tuning_time);
      if (other != onu.tuned_channel && diff < same) {
        channel = other;
        sched = diff;
      } else {
        channel = onu.tuned_channel;
        sched = same;
      }
    }

    channels_[channel].occupy(sched, duration);
    ++alloc_count_[channel];
    onu.tuned_channel = channel;
    onu.free_time = sched + duration;
    out[channel].push_back({a, channel, sched});
  }
  return out;
}

ChannelSchedule DtwaScheduler::run_frame(std::vector<VirtualBMap> bmaps,
                                         const SlaTable& slas,
                                         BreachTracker& tracker) {
  calc_max_time(bmaps, slas);
  if (!bmaps.empty()) {
    frame_start_ = bmaps.front().frame_index * kFrameNs;
    for (auto& ch : channels_) ch.prune(frame_start_);
  }
  std::vector<Allocation> sorted = sort_bmaps(bmaps, tracker.fractions());
  ChannelSchedule scheduled = assign_resource(sorted);
  tracker.observe_frame(scheduled);
  return scheduled;
}

}  // namespace twdm
