#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "twdm/oracle.hpp"

using namespace twdm;

namespace {

OracleAllocation alloc(int flow, int onu, Ns start, Ns size,
                       Ns max_time = kInfNs) {
  OracleAllocation a;
  a.flow_id = flow;
  a.onu_id = onu;
  a.start = start;
  a.size = size;
  a.max_time = max_time;
  return a;
}

}  // namespace

TEST_CASE("instance size limits are enforced") {
  OracleInstance inst;
  inst.n_channels = kOracleMaxChannels + 1;
  CHECK_THROWS_AS(inst.validate(), ConfigError);
  inst.n_channels = 1;
  for (int i = 0; i <= kOracleMaxAllocations; ++i)
    inst.allocations.push_back(alloc(0, 0, 0, 100));
  CHECK_THROWS_AS(inst.validate(), ConfigError);
}

TEST_CASE("evaluate_objective counts breached flows") {
  OracleInstance inst;
  inst.n_channels = 1;
  inst.guard_time = 0;
  inst.breach_threshold = {{0, 0.0}, {1, 0.6}};
  inst.allocations = {alloc(0, 0, 0, 100, 50),    // late if sched > -  (50)
                      alloc(1, 1, 0, 100, 5'000)};
  // Flow 0: 1 of 1 delayed (sched 110 > 50) -> fraction 1 > 0: breached.
  // Flow 1: on time.
  std::vector<OracleAssignment> asg = {{0, 110}, {0, 0}};
  CHECK(evaluate_objective(asg, inst) == 1);

  SUBCASE("overlapping channel booking violates constraint 3") {
    asg = {{0, 50}, {0, 0}};
    CHECK_THROWS_AS(evaluate_objective(asg, inst), InvariantError);
  }

  SUBCASE("scheduling before the request violates constraint 4") {
    asg = {{0, 110}, {0, -10}};
    CHECK_THROWS_AS(evaluate_objective(asg, inst), InvariantError);
  }

  SUBCASE("a partial assignment violates constraint 5") {
    asg = {{0, 110}};
    CHECK_THROWS_AS(evaluate_objective(asg, inst), InvariantError);
  }
}

TEST_CASE("exact solver finds the obvious optimum") {
  // Two tight-deadline allocations that cannot both make it on one channel
  // but fit perfectly on two.
  OracleInstance inst;
  inst.n_channels = 2;
  inst.guard_time = 0;
  inst.breach_threshold = {{0, 0.0}, {1, 0.0}};
  inst.allocations = {alloc(0, 0, 0, 1'000, 900),
                      alloc(1, 1, 0, 1'000, 900)};
  OracleSolution sol = solve_exact(inst);
  CHECK(sol.objective == 0);
  CHECK(sol.assignment[0].channel != sol.assignment[1].channel);

  SUBCASE("one channel forces a breach") {
    inst.n_channels = 1;
    sol = solve_exact(inst);
    CHECK(sol.objective == 1);
  }
}

TEST_CASE("tuning time gates a switched ONU, exact solver respects it") {
  // One ONU with two back-to-back bursts; with a huge tuning time the
  // second burst cannot make its deadline on the other channel.
  OracleInstance inst;
  inst.n_channels = 2;
  inst.guard_time = 0;
  inst.tuning_time = 50'000;
  inst.breach_threshold = {{0, 0.0}};
  inst.allocations = {alloc(0, 0, 0, 1'000, 2'000),
                      alloc(0, 0, 0, 1'000, 2'500)};
  OracleSolution sol = solve_exact(inst);
  CHECK(sol.objective == 0);
  // Service must stay serialized on the ONU: same channel, no tuning gap.
  CHECK(sol.assignment[0].channel == sol.assignment[1].channel);
}

TEST_CASE("physical=false relaxes ONU serialization") {
  OracleInstance inst;
  inst.n_channels = 2;
  inst.guard_time = 0;
  inst.breach_threshold = {{0, 0.0}};
  // The same ONU must transmit twice in a window only parallel channels
  // can satisfy.
  inst.allocations = {alloc(0, 0, 0, 1'000, 800),
                      alloc(0, 0, 0, 1'000, 800)};
  CHECK(solve_exact(inst).objective == 1);   // physically impossible
  inst.physical = false;
  CHECK(solve_exact(inst).objective == 0);   // relaxation allows overlap
}

TEST_CASE("greedy follows the production rule and never beats the oracle") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    OracleRandomParams params;
    params.n_allocations = 6 + static_cast<int>(seed % 4);
    params.n_channels = 2 + static_cast<int>(seed % 2);
    params.sla_fraction = 0.25 + 0.05 * (seed % 10);
    params.tuning_time = 250;
    OracleInstance inst = random_instance(seed, params);
    OracleSolution exact = solve_exact(inst);
    OracleSolution greedy = solve_greedy(inst);
    CAPTURE(seed);
    CHECK(evaluate_objective(greedy.assignment, inst) == greedy.objective);
    CHECK(greedy.objective >= exact.objective);
  }
}

TEST_CASE("random instances honour the requested SLA mix") {
  OracleRandomParams params;
  params.n_allocations = 12;
  params.sla_fraction = 0.0;
  OracleInstance none = random_instance(7, params);
  for (const auto& a : none.allocations) CHECK(a.max_time == kInfNs);
  params.sla_fraction = 1.0;
  OracleInstance all = random_instance(7, params);
  for (const auto& a : all.allocations) CHECK(a.max_time != kInfNs);
}

TEST_CASE("serialize and parse round-trip an instance") {
  OracleRandomParams params;
  params.sla_fraction = 0.5;
  OracleInstance inst = random_instance(3, params);
  std::istringstream in(serialize_instance(inst));
  OracleInstance back = parse_instance(in);
  REQUIRE(back.allocations.size() == inst.allocations.size());
  CHECK(back.n_channels == inst.n_channels);
  CHECK(back.tuning_time == inst.tuning_time);
  CHECK(back.guard_time == inst.guard_time);
  CHECK(back.physical == inst.physical);
  CHECK(back.breach_threshold == inst.breach_threshold);
  for (std::size_t i = 0; i < inst.allocations.size(); ++i) {
    CHECK(back.allocations[i].flow_id == inst.allocations[i].flow_id);
    CHECK(back.allocations[i].onu_id == inst.allocations[i].onu_id);
    CHECK(back.allocations[i].start == inst.allocations[i].start);
    CHECK(back.allocations[i].size == inst.allocations[i].size);
    CHECK(back.allocations[i].max_time == inst.allocations[i].max_time);
  }
}
