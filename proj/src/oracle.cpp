#include "twdm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace twdm {

namespace {
constexpr double kEps = 1e-9;
}

void OracleInstance::validate() const {
  if (static_cast<int>(allocations.size()) > kOracleMaxAllocations)
    throw ConfigError("oracle instance has " +
                      std::to_string(allocations.size()) +
                      " allocations, limit is " +
                      std::to_string(kOracleMaxAllocations));
  if (n_channels < 1 || n_channels > kOracleMaxChannels)
    throw ConfigError("oracle instance channel count " +
                      std::to_string(n_channels) + " outside [1, " +
                      std::to_string(kOracleMaxChannels) + "]");
  for (const auto& a : allocations)
    if (a.size <= 0 || a.start < 0)
      throw ConfigError("oracle allocation needs start >= 0 and size > 0");
}

int evaluate_objective(const std::vector<OracleAssignment>& assignment,
                       const OracleInstance& instance) {
  const auto& allocs = instance.allocations;
  if (assignment.size() != allocs.size())
    throw InvariantError(
        "constraint (5) violated: assignment covers " +
        std::to_string(assignment.size()) + " of " +
        std::to_string(allocs.size()) + " allocations");
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto& asg = assignment[i];
    if (asg.channel < 0 || asg.channel >= instance.n_channels ||
        asg.sched_time < allocs[i].start)
      throw InvariantError(
          "constraint (4) violated: allocation " + std::to_string(i) +
          " has no valid unique channel/time-slot pair");
  }
  // Constraint (3): at most one allocation per channel at any time.
  for (int k = 0; k < instance.n_channels; ++k) {
    std::vector<std::size_t> on_channel;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i].channel == k) on_channel.push_back(i);
    std::sort(on_channel.begin(), on_channel.end(),
              [&](std::size_t a, std::size_t b) {
                return assignment[a].sched_time < assignment[b].sched_time;
              });
    for (std::size_t j = 1; j < on_channel.size(); ++j) {
      std::size_t prev = on_channel[j - 1];
      std::size_t cur = on_channel[j];
      if (assignment[prev].sched_time + allocs[prev].size >
          assignment[cur].sched_time)
        throw InvariantError(
            "constraint (3) violated: allocations " + std::to_string(prev) +
            " and " + std::to_string(cur) + " overlap on channel " +
            std::to_string(k));
    }
  }

  std::map<int, std::pair<long, long>> per_flow;  // (delayed, total)
  for (std::size_t i = 0; i < allocs.size(); ++i) {
    auto& [delayed, total] = per_flow[allocs[i].flow_id];
    ++total;
    if (allocs[i].max_time != kInfNs &&
        assignment[i].sched_time > allocs[i].max_time)
      ++delayed;
  }
  int breached = 0;
  for (const auto& [flow, counts] : per_flow) {
    auto it = instance.breach_threshold.find(flow);
    double threshold = it == instance.breach_threshold.end() ? 0.0 : it->second;
    double fraction = static_cast<double>(counts.first) / counts.second;
    if (fraction > threshold + kEps) ++breached;
  }
  return breached;
}

namespace {

// Depth-first branch and bound over (next allocation, channel) choices.
// Every allocation is placed at the earliest feasible time on the chosen
// channel, which is exhaustive for this objective: it is non-decreasing in
// every scheduled time, so some dispatch order realizes an optimum.
class Search {
 public:
  explicit Search(const OracleInstance& instance) : inst_(instance) {
    int n = static_cast<int>(inst_.allocations.size());
    chan_free_.assign(inst_.n_channels, 0);
    tuned_onus_.assign(inst_.n_channels, 0);

    for (int i = 0; i < n; ++i) {
      const auto& a = inst_.allocations[i];
      if (!flow_index_.count(a.flow_id)) {
        int f = static_cast<int>(flow_index_.size());
        flow_index_[a.flow_id] = f;
        auto it = inst_.breach_threshold.find(a.flow_id);
        flow_threshold_.push_back(
            it == inst_.breach_threshold.end() ? 0.0 : it->second);
        flow_total_.push_back(0);
      }
      ++flow_total_[flow_index_[a.flow_id]];
      if (!onu_index_.count(a.onu_id)) {
        int o = static_cast<int>(onu_index_.size());
        onu_index_[a.onu_id] = o;
        onu_free_.push_back(0);
        onu_tuned_.push_back(kUntuned);
      }
    }
    flow_delayed_.assign(flow_total_.size(), 0);
    scheduled_.assign(n, false);
    assignment_.assign(n, {});

    // Static branching order: earliest deadline first gives good incumbents.
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [this](int a, int b) {
      const auto& x = inst_.allocations[a];
      const auto& y = inst_.allocations[b];
      return std::tie(x.max_time, x.start, a) < std::tie(y.max_time, y.start, b);
    });
  }

  OracleSolution run() {
    best_objective_ = std::numeric_limits<int>::max();
    best_delay_ = std::numeric_limits<Ns>::max();
    dfs(0, 0);
    OracleSolution sol;
    sol.assignment = best_assignment_;
    sol.objective = best_objective_;
    sol.total_delay = best_delay_;
    sol.nodes_explored = nodes_;
    return sol;
  }

 private:
  static bool flow_breached(long delayed, long total, double threshold) {
    return static_cast<double>(delayed) / total > threshold + kEps;
  }

  Ns earliest_start(const OracleAllocation& a, int channel) const {
    Ns t = std::max(a.start, chan_free_[channel]);
    if (inst_.physical) {
      int o = onu_index_.at(a.onu_id);
      Ns onu_ready = onu_free_[o];
      if (onu_tuned_[o] != kUntuned && onu_tuned_[o] != channel)
        onu_ready += inst_.tuning_time;
      t = std::max(t, onu_ready);
    }
    return t;
  }

  // Lower bound on any completion of the current partial schedule.
  std::pair<int, Ns> bound(int placed) const {
    Ns min_free = *std::min_element(chan_free_.begin(), chan_free_.end());
    std::vector<long> forced(flow_delayed_.begin(), flow_delayed_.end());
    Ns delay_lb = cur_delay_;
    int n = static_cast<int>(inst_.allocations.size());
    for (int i = 0; i < n; ++i) {
      if (scheduled_[i]) continue;
      const auto& a = inst_.allocations[i];
      Ns min_sched = std::max(a.start, min_free);
      if (inst_.physical)
        min_sched = std::max(min_sched, onu_free_[onu_index_.at(a.onu_id)]);
      delay_lb += min_sched - a.start;
      if (a.max_time != kInfNs && min_sched > a.max_time)
        ++forced[flow_index_.at(a.flow_id)];
    }
    int obj_lb = 0;
    for (std::size_t f = 0; f < forced.size(); ++f)
      if (flow_breached(forced[f], flow_total_[f], flow_threshold_[f]))
        ++obj_lb;
    (void)placed;
    return {obj_lb, delay_lb};
  }

  void dfs(int placed, Ns /*unused*/) {
    ++nodes_;
    int n = static_cast<int>(inst_.allocations.size());
    if (placed == n) {
      int obj = 0;
      for (std::size_t f = 0; f < flow_delayed_.size(); ++f)
        if (flow_breached(flow_delayed_[f], flow_total_[f],
                          flow_threshold_[f]))
          ++obj;
      if (obj < best_objective_ ||
          (obj == best_objective_ && cur_delay_ < best_delay_)) {
        best_objective_ = obj;
        best_delay_ = cur_delay_;
        best_assignment_ = assignment_;
      }
      return;
    }

    auto [obj_lb, delay_lb] = bound(placed);
    if (obj_lb > best_objective_ ||
        (obj_lb == best_objective_ && delay_lb >= best_delay_))
      return;

    for (int i : order_) {
      if (scheduled_[i]) continue;
      const auto& a = inst_.allocations[i];
      Ns prev_seen = -1;
      for (int k = 0; k < inst_.n_channels; ++k) {
        // Channels with equal free time and no tuned ONU are interchangeable;
        // branch only the first of each group.
        bool bare = tuned_onus_[k] == 0;
        if (bare && chan_free_[k] == prev_seen) continue;
        if (bare) prev_seen = chan_free_[k];

        Ns sched = earliest_start(a, k);
        place(i, k, sched);
        dfs(placed + 1, 0);
        unplace(i, k);
      }
    }
  }

  void place(int i, int k, Ns sched) {
    const auto& a = inst_.allocations[i];
    scheduled_[i] = true;
    assignment_[i] = {k, sched};
    trail_.push_back({i, k, chan_free_[k], 0, kUntuned, false});
    auto& saved = trail_.back();
    chan_free_[k] = sched + a.size + inst_.guard_time;
    cur_delay_ += sched - a.start;
    if (a.max_time != kInfNs && sched > a.max_time) {
      ++flow_delayed_[flow_index_.at(a.flow_id)];
      saved.counted_delay = true;
    }
    if (inst_.physical) {
      int o = onu_index_.at(a.onu_id);
      saved.onu_free = onu_free_[o];
      saved.onu_tuned = onu_tuned_[o];
      if (onu_tuned_[o] != kUntuned) --tuned_onus_[onu_tuned_[o]];
      onu_free_[o] = sched + a.size + inst_.guard_time;
      onu_tuned_[o] = k;
      ++tuned_onus_[k];
    }
  }

  void unplace(int i, int k) {
    const auto& a = inst_.allocations[i];
    auto saved = trail_.back();
    trail_.pop_back();
    if (inst_.physical) {
      int o = onu_index_.at(a.onu_id);
      --tuned_onus_[k];
      if (saved.onu_tuned != kUntuned) ++tuned_onus_[saved.onu_tuned];
      onu_free_[o] = saved.onu_free;
      onu_tuned_[o] = saved.onu_tuned;
    }
    if (saved.counted_delay)
      --flow_delayed_[flow_index_.at(a.flow_id)];
    cur_delay_ -= assignment_[i].sched_time - a.start;
    chan_free_[k] = saved.chan_free;
    scheduled_[i] = false;
  }

  struct TrailEntry {
    int alloc;
    int channel;
    Ns chan_free;
    Ns onu_free;
    int onu_tuned;
    bool counted_delay;
  };

  const OracleInstance& inst_;
  std::map<int, int> flow_index_;
  std::map<int, int> onu_index_;
  std::vector<double> flow_threshold_;
  std::vector<long> flow_total_;
  std::vector<long> flow_delayed_;
  std::vector<Ns> chan_free_;
  std::vector<int> tuned_onus_;
  std::vector<Ns> onu_free_;
  std::vector<int> onu_tuned_;
  std::vector<bool> scheduled_;
  std::vector<OracleAssignment> assignment_;
  std::vector<OracleAssignment> best_assignment_;
  std::vector<int> order_;
  std::vector<TrailEntry> trail_;
  Ns cur_delay_ = 0;
  int best_objective_ = 0;
  Ns best_delay_ = 0;
  long nodes_ = 0;
};

}  // namespace

OracleSolution solve_exact(const OracleInstance& instance) {
  instance.validate();
  if (instance.allocations.empty()) return {};
  Search search(instance);
  OracleSolution sol = search.run();
  // Cross-check the search's bookkeeping against the pure evaluator.
  int checked = evaluate_objective(sol.assignment, instance);
  if (checked != sol.objective)
    throw InvariantError("oracle bookkeeping mismatch: search objective " +
                         std::to_string(sol.objective) + " vs evaluated " +
                         std::to_string(checked));
  return sol;
}

OracleSolution solve_greedy(const OracleInstance& instance) {
  instance.validate();
  int n = static_cast<int>(instance.allocations.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = instance.allocations[a];
    const auto& y = instance.allocations[b];
    return std::tie(x.max_time, x.size, a) < std::tie(y.max_time, y.size, b);
  });

  std::vector<Ns> chan_free(instance.n_channels, 0);
  std::map<int, Ns> onu_free;
  std::map<int, int> onu_tuned;
  OracleSolution sol;
  sol.assignment.assign(n, {});

  for (int i : order) {
    const auto& a = instance.allocations[i];
    Ns& o_free = onu_free[a.onu_id];
    auto tuned_it = onu_tuned.find(a.onu_id);
    int tuned = tuned_it == onu_tuned.end() ? kUntuned : tuned_it->second;

    int best = 0;
    for (int k = 1; k < instance.n_channels; ++k)
      if (chan_free[k] < chan_free[best]) best = k;

    int channel;
    Ns sched;
    if (!instance.physical) {
      channel = best;
      sched = std::max(a.start, chan_free[best]);
    } else if (tuned == kUntuned) {
      channel = best;
      sched = std::max({a.start, chan_free[best], o_free});
    } else {
      Ns same = std::max({a.start, chan_free[tuned], o_free});
      Ns other =
          std::max({a.start, chan_free[best], o_free + instance.tuning_time});
      if (best != tuned && other < same) {
        channel = best;
        sched = other;
      } else {
        channel = tuned;
        sched = same;
      }
    }
    sol.assignment[i] = {channel, sched};
    chan_free[channel] = sched + a.size + instance.guard_time;
    if (instance.physical) {
      o_free = sched + a.size + instance.guard_time;
      onu_tuned[a.onu_id] = channel;
    }
    sol.total_delay += sched - a.start;
  }
  sol.objective = evaluate_objective(sol.assignment, instance);
  return sol;
}

OracleInstance random_instance(std::uint64_t seed,
                               const OracleRandomParams& params) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&rng](long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  OracleInstance inst;
  inst.n_channels = params.n_channels;
  inst.tuning_time = params.tuning_time;
  inst.guard_time = params.guard_time;
  inst.physical = params.physical;
  for (int f = 0; f < params.n_flows; ++f)
    inst.breach_threshold[f] = params.threshold;

  for (int i = 0; i < params.n_allocations; ++i) {
    OracleAllocation a;
    a.flow_id = static_cast<int>(uniform_int(0, params.n_flows - 1));
    a.onu_id = static_cast<int>(uniform_int(0, params.n_onus - 1));
    a.start = uniform_int(0, 1'500);
    a.size = uniform_int(300, 1'200);
    // Deadlines close to the contention horizon: roughly what a full
    // channel would reach, so optimal channel choice decides breaches.
    // Allocations beyond the SLA share are best effort (no deadline).
    bool timed = static_cast<double>(rng() % 1'000'000) <
                 params.sla_fraction * 1'000'000;
    a.max_time =
        timed ? a.start + uniform_int(a.size, 3 * a.size + 1'500) : kInfNs;
    inst.allocations.push_back(a);
  }
  inst.validate();
  return inst;
}

std::string serialize_instance(const OracleInstance& instance) {
  std::ostringstream out;
  out << "twdm-oracle-instance v1\n";
  out << "channels " << instance.n_channels << "\n";
  out << "tuning_ns " << instance.tuning_time << "\n";
  out << "guard_ns " << instance.guard_time << "\n";
  out << "physical " << (instance.physical ? 1 : 0) << "\n";
  for (const auto& [flow, threshold] : instance.breach_threshold)
    out << "flow " << flow << " " << threshold << "\n";
  for (const auto& a : instance.allocations) {
    out << "alloc " << a.flow_id << " " << a.onu_id << " " << a.start << " "
        << a.size << " ";
    if (a.max_time == kInfNs)
      out << "inf";
    else
      out << a.max_time;
    out << "\n";
  }
  return out.str();
}

OracleInstance parse_instance(std::istream& in) {
  OracleInstance inst;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line.rfind("twdm-oracle-instance", 0) != 0)
    throw ConfigError("oracle instance: missing header line");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "channels") fields >> inst.n_channels;
    else if (tag == "tuning_ns") fields >> inst.tuning_time;
    else if (tag == "guard_ns") fields >> inst.guard_time;
    else if (tag == "physical") { int v; fields >> v; inst.physical = v != 0; }
    else if (tag == "flow") {
      int id; double threshold;
      fields >> id >> threshold;
      inst.breach_threshold[id] = threshold;
    } else if (tag == "alloc") {
      OracleAllocation a;
      std::string max_field;
      fields >> a.flow_id >> a.onu_id >> a.start >> a.size >> max_field;
      a.max_time = max_field == "inf" ? kInfNs : std::stoll(max_field);
      inst.allocations.push_back(a);
    } else {
      throw ConfigError("oracle instance: unknown record '" + tag +
                        "' at body line " + std::to_string(line_no));
    }
    if (fields.fail())
      throw ConfigError("oracle instance: malformed record at body line " +
                        std::to_string(line_no));
  }
  inst.validate();
  return inst;
}

OracleInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open oracle instance file " + path);
  return parse_instance(in);
}

}  // namespace twdm
