#pragma once
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "twdm/model.hpp"

namespace twdm {

constexpr int kOracleMaxAllocations = 12;
constexpr int kOracleMaxChannels = 3;

struct OracleAllocation {
  int flow_id = 0;
  int onu_id = 0;
  Ns start = 0;
  Ns size = 0;
  Ns max_time = kInfNs;   // kInfNs: never counted as delayed
};

// A small scheduling instance solved to optimality. `physical` enables ONU
// serialization and tuning-time feasibility on top of the bare channel
// constraints; disabling it evaluates the literal slot-exclusivity relaxation.
struct OracleInstance {
  std::vector<OracleAllocation> allocations;
  int n_channels = 1;
  Ns tuning_time = 0;
  Ns guard_time = 0;
  bool physical = true;
  std::map<int, double> breach_threshold;  // per flow

  void validate() const;   // ConfigError on size-limit overflow
};

struct OracleAssignment {
  int channel = 0;
  Ns sched_time = 0;
};

struct OracleSolution {
  std::vector<OracleAssignment> assignment;  // indexed like allocations
  int objective = 0;        // number of breached flows
  Ns total_delay = 0;       // secondary optimization key
  long nodes_explored = 0;  // search log size
};

// Counts flows whose delayed fraction strictly exceeds their threshold.
// Validates channel exclusivity, uniqueness, and conservation first and
// throws InvariantError naming the violated constraint (3, 4, or 5).
int evaluate_objective(const std::vector<OracleAssignment>& assignment,
                       const OracleInstance& instance);

// Complete branch-and-bound over dispatch orders and channel choices with
// event-driven times; bounds only, no optimality-sacrificing pruning.
// Minimizes the flow-breach count, then total scheduled delay.
OracleSolution solve_exact(const OracleInstance& instance);

// The production greedy rule applied to the same instance: allocations
// sorted by (max_time, size, index), each placed at its earliest feasible
// time on the stay-or-switch channel choice. Always within the exact
// solver's search space, so solve_exact never does worse.
OracleSolution solve_greedy(const OracleInstance& instance);

struct OracleRandomParams {
  int n_allocations = 8;
  int n_channels = 3;
  int n_flows = 3;
  int n_onus = 4;
  double threshold = 0.0;
  double sla_fraction = 1.0;  // share of allocations with finite deadlines
  Ns tuning_time = 500;
  Ns guard_time = kGuardNs;
  bool physical = true;
};

// Seeded contention-heavy instance: clustered starts and tight deadlines
// so channel choice actually matters.
OracleInstance random_instance(std::uint64_t seed,
                               const OracleRandomParams& params);

// Structured text records for regression corpora.
std::string serialize_instance(const OracleInstance& instance);
OracleInstance parse_instance(std::istream& in);
OracleInstance load_instance(const std::string& path);

}  // namespace twdm
