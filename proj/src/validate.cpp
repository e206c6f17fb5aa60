#include "twdm/validate.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace twdm {

namespace {
using AllocId = std::tuple<int, int, std::uint64_t>;  // (vno, onu, seq)

std::string id_str(const Allocation& a) {
  return "(vno=" + std::to_string(a.vno_id) +
         ", onu=" + std::to_string(a.onu_id) +
         ", seq=" + std::to_string(a.seq) + ")";
}
}  // namespace

void ScheduleValidator::check_frame(const std::vector<VirtualBMap>& input,
                                    const ChannelSchedule& output,
                                    std::vector<std::string>& violations) {
  // Conservation: output multiset equals input multiset.
  std::map<AllocId, int> balance;
  for (const auto& bmap : input)
    for (const auto& a : bmap.allocations)
      ++balance[{a.vno_id, a.onu_id, a.seq}];
  for (const auto& channel : output)
    for (const auto& s : channel)
      --balance[{s.alloc.vno_id, s.alloc.onu_id, s.alloc.seq}];
  for (const auto& [id, count] : balance)
    if (count != 0)
      violations.push_back(
          "conservation: allocation (vno=" + std::to_string(std::get<0>(id)) +
          ", onu=" + std::to_string(std::get<1>(id)) +
          ", seq=" + std::to_string(std::get<2>(id)) +
          ") input/output imbalance of " + std::to_string(count));

  if (static_cast<int>(output.size()) != n_channels_)
    violations.push_back("output has " + std::to_string(output.size()) +
                         " channel lists, expected " +
                         std::to_string(n_channels_));

  // Channel exclusivity and no early transmission. Output lists are in
  // assignment order, so compare bursts in time order.
  for (std::size_t k = 0; k < output.size(); ++k) {
    std::vector<const ScheduledAllocation*> bursts;
    for (const auto& s : output[k]) bursts.push_back(&s);
    std::stable_sort(bursts.begin(), bursts.end(),
                     [](const ScheduledAllocation* a,
                        const ScheduledAllocation* b) {
                       return a->sched_time < b->sched_time;
                     });
    for (std::size_t j = 0; j < bursts.size(); ++j) {
      const auto& s = *bursts[j];
      if (s.sched_time < s.alloc.start_time)
        violations.push_back("early transmission: " + id_str(s.alloc) +
                             " scheduled before its requested start");
      if (j > 0) {
        const auto& prev = *bursts[j - 1];
        if (prev.sched_time + prev.alloc.size > s.sched_time)
          violations.push_back("channel " + std::to_string(k) +
                               " double-booking: " + id_str(prev.alloc) +
                               " overlaps " + id_str(s.alloc));
      }
    }
  }

  // Per-ONU serialization and tuning gaps, in global time order.
  std::vector<const ScheduledAllocation*> all;
  for (const auto& channel : output)
    for (const auto& s : channel) all.push_back(&s);
  std::stable_sort(all.begin(), all.end(),
                   [](const ScheduledAllocation* a,
                      const ScheduledAllocation* b) {
                     return a->sched_time < b->sched_time;
                   });
  for (const ScheduledAllocation* s : all) {
    OnuHistory& h = onus_[s->alloc.onu_id];
    if (h.channel != kUntuned) {
      if (s->sched_time < h.end_time)
        violations.push_back("ONU overlap: " + id_str(s->alloc) +
                             " starts before the ONU's previous burst ends");
      if (s->channel != h.channel &&
          s->sched_time < h.end_time + tuning_time_)
        violations.push_back("tuning gap: " + id_str(s->alloc) +
                             " switches channel within the tuning time");
    }
    h.channel = s->channel;
    h.end_time = s->sched_time + s->alloc.size;
  }
}

}  // namespace twdm
