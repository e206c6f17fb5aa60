#include "twdm/model.hpp"

#include <algorithm>
#include <string>

namespace twdm {

SlaClass make_sla(int id, double max_latency_us, double compliance) {
  if (compliance <= 0.0 || compliance > 1.0)
    throw ConfigError("SLA class " + std::to_string(id) +
                      ": compliance must lie in (0, 1]");
  SlaClass c;
  c.id = id;
  c.max_latency = us_to_ns(max_latency_us);
  c.compliance = compliance;
  c.breach_threshold = 1.0 - compliance;
  c.best_effort = false;
  return c;
}

SlaClass make_best_effort(int id) {
  SlaClass c;
  c.id = id;
  c.max_latency = kInfNs;
  c.compliance = 1.0;
  c.breach_threshold = 1.0;
  c.best_effort = true;
  return c;
}

Ns ChannelTimeline::earliest_fit(Ns ready, Ns duration) const {
  for (const Gap& g : gaps_) {
    Ns t = std::max(g.begin, ready);
    if (t + duration <= g.end) return t;
  }
  return std::max(tail_, ready);
}

void ChannelTimeline::occupy(Ns t, Ns duration) {
  if (t >= tail_) {
    if (t > tail_) gaps_.push_back({tail_, t});
    tail_ = t + duration;
    return;
  }
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    Gap g = gaps_[i];
    if (g.begin <= t && t + duration <= g.end) {
      std::vector<Gap> pieces;
      if (g.begin < t) pieces.push_back({g.begin, t});
      if (t + duration < g.end) pieces.push_back({t + duration, g.end});
      gaps_.erase(gaps_.begin() + i);
      gaps_.insert(gaps_.begin() + i, pieces.begin(), pieces.end());
      return;
    }
  }
  throw InvariantError("timeline occupation at " + std::to_string(t) +
                       " does not fit any free interval");
}

void ChannelTimeline::prune(Ns horizon) {
  std::erase_if(gaps_, [horizon](const Gap& g) { return g.end <= horizon; });
  for (Gap& g : gaps_) g.begin = std::max(g.begin, horizon);
}

void calc_max_time(std::vector<VirtualBMap>& bmaps, const SlaTable& slas) {
  for (auto& bmap : bmaps) {
    for (auto& a : bmap.allocations) {
      auto it = slas.find(a.sla_id);
      if (it == slas.end())
        throw ConfigError("unknown sla_id " + std::to_string(a.sla_id) +
                          " on allocation (vno=" + std::to_string(a.vno_id) +
                          ", onu=" + std::to_string(a.onu_id) +
                          ", seq=" + std::to_string(a.seq) + ")");
      const SlaClass& sla = it->second;
      a.max_time = sla.best_effort || sla.max_latency == kInfNs
                       ? kInfNs
                       : a.start_time + sla.max_latency;
    }
  }
}

}  // namespace twdm
