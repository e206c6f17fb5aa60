#pragma once
#include <string>
#include <vector>

#include "twdm/model.hpp"

namespace twdm {

// Checks one frame's merged output against the scheduling constraints:
// channel exclusivity, exact conservation of the input multiset, per-ONU
// serialization, tuning gaps on channel changes, and sched >= start.
// ONU tuning history must carry across frames, so the validator is stateful.
class ScheduleValidator {
 public:
  ScheduleValidator(int n_channels, Ns tuning_time)
      : n_channels_(n_channels), tuning_time_(tuning_time) {}

  // Appends a description of every violation found to `violations`.
  void check_frame(const std::vector<VirtualBMap>& input,
                   const ChannelSchedule& output,
                   std::vector<std::string>& violations);

 private:
  struct OnuHistory {
    int channel = kUntuned;
    Ns end_time = 0;   // sched + size of the previous burst
  };

  int n_channels_;
  Ns tuning_time_;
  std::map<int, OnuHistory> onus_;
};

}  // namespace twdm
