#pragma once
#include <array>
#include <map>
#include <utility>
#include <vector>

#include "twdm/model.hpp"

namespace twdm {

// Rolling per-flow delayed-allocation statistics over the 1 ms window
// (8 frames). An allocation is delayed iff sched_time > max_time (strict).
// A flow is breached for the current window iff its delayed fraction
// strictly exceeds the class breach threshold; best-effort flows never are.
class BreachTracker {
 public:
  explicit BreachTracker(const SlaTable& slas) : slas_(slas) {}

  struct FlowState {
    std::array<std::pair<long, long>, kBreachWindowFrames> ring{};  // (delayed, total)
    int head = 0;
    long sum_delayed = 0;
    long sum_total = 0;
    double fraction = 0.0;
    bool breached = false;        // current window
    long breach_events = 0;       // cumulative breached windows
    double threshold = 0.0;
    bool best_effort = false;
  };

  // Slides every flow's window by one frame and folds in this frame's
  // schedule. Splitting the same frame across channel lists differently
  // does not change the result.
  void observe_frame(const ChannelSchedule& scheduled);

  const std::map<FlowKey, FlowState>& flows() const { return flows_; }
  const BreachTable& fractions() const { return fractions_; }

  // Mean over SLA flows and observed windows of "window not breached".
  // Windows with no traffic for a flow are not counted. 1.0 with no samples.
  double compliance() const {
    return window_samples_ == 0
               ? 1.0
               : 1.0 - static_cast<double>(breached_samples_) / window_samples_;
  }

  long window_samples() const { return window_samples_; }
  long breached_samples() const { return breached_samples_; }
  long total_breach_events() const;

 private:
  FlowState& flow_state(FlowKey key);

  const SlaTable& slas_;
  std::map<FlowKey, FlowState> flows_;
  BreachTable fractions_;
  long window_samples_ = 0;
  long breached_samples_ = 0;
};

}  // namespace twdm
