#include "twdm/breach.hpp"

#include <string>

namespace twdm {

BreachTracker::FlowState& BreachTracker::flow_state(FlowKey key) {
  auto it = flows_.find(key);
  if (it == flows_.end()) {
    auto sla = slas_.find(key.sla_id);
    if (sla == slas_.end())
      throw ConfigError("breach tracker: unknown sla_id " +
                        std::to_string(key.sla_id));
    FlowState st;
    st.threshold = sla->second.breach_threshold;
    st.best_effort = sla->second.best_effort;
    it = flows_.emplace(key, st).first;
  }
  return it->second;
}

void BreachTracker::observe_frame(const ChannelSchedule& scheduled) {
  // Accumulate this frame's per-flow counts first, then commit once, so the
  // result is independent of how allocations are split across channel lists.
  std::map<FlowKey, std::pair<long, long>> frame_counts;
  for (const auto& channel : scheduled) {
    for (const auto& s : channel) {
      auto& [delayed, total] = frame_counts[s.alloc.flow()];
      ++total;
      if (s.sched_time > s.alloc.max_time) ++delayed;
    }
  }
  for (const auto& [key, counts] : frame_counts) flow_state(key);

  for (auto& [key, st] : flows_) {
    auto it = frame_counts.find(key);
    std::pair<long, long> fresh =
        it == frame_counts.end() ? std::pair<long, long>{0, 0} : it->second;

    auto& slot = st.ring[st.head];
    st.sum_delayed += fresh.first - slot.first;
    st.sum_total += fresh.second - slot.second;
    slot = fresh;
    st.head = (st.head + 1) % kBreachWindowFrames;

    st.fraction = st.sum_total == 0
                      ? 0.0
                      : static_cast<double>(st.sum_delayed) / st.sum_total;
    st.breached = !st.best_effort && st.fraction > st.threshold;
    fractions_[key] = st.fraction;

    if (!st.best_effort && st.sum_total > 0) {
      ++window_samples_;
      if (st.breached) {
        ++breached_samples_;
        ++st.breach_events;
      }
    }
  }
}

long BreachTracker::total_breach_events() const {
  long events = 0;
  for (const auto& [key, st] : flows_) events += st.breach_events;
  return events;
}

}  // namespace twdm
