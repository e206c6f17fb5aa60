#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twdm/model.hpp"

using namespace twdm;

namespace {

Allocation alloc(int vno, int onu, int sla, Ns start, Ns size, Ns max_time,
                 std::uint64_t seq) {
  Allocation a;
  a.vno_id = vno;
  a.onu_id = onu;
  a.sla_id = sla;
  a.start_time = start;
  a.size = size;
  a.max_time = max_time;
  a.seq = seq;
  return a;
}

}  // namespace

TEST_CASE("make_sla converts latency and derives the breach threshold") {
  SlaClass c = make_sla(3, 12.5, 0.90);
  CHECK(c.id == 3);
  CHECK(c.max_latency == 12'500);
  CHECK(c.compliance == doctest::Approx(0.90));
  CHECK(c.breach_threshold == doctest::Approx(0.10));
  CHECK_FALSE(c.best_effort);

  CHECK_THROWS_AS(make_sla(1, 10.0, 0.0), ConfigError);
  CHECK_THROWS_AS(make_sla(1, 10.0, 1.5), ConfigError);
}

TEST_CASE("make_best_effort never expires and never breaches") {
  SlaClass c = make_best_effort(2);
  CHECK(c.best_effort);
  CHECK(c.max_latency == kInfNs);
  CHECK(c.breach_threshold == doctest::Approx(1.0));
}

TEST_CASE("calc_max_time stamps start + latency, best effort gets infinity") {
  SlaTable slas;
  slas[0] = make_sla(0, 12.5, 0.9);
  slas[2] = make_best_effort(2);

  std::vector<VirtualBMap> bmaps(1);
  bmaps[0].allocations.push_back(alloc(0, 1, 0, 1'000, 500, -1, 0));
  bmaps[0].allocations.push_back(alloc(0, 2, 2, 3'000, 500, -1, 1));
  calc_max_time(bmaps, slas);
  CHECK(bmaps[0].allocations[0].max_time == 1'000 + 12'500);
  CHECK(bmaps[0].allocations[1].max_time == kInfNs);

  SUBCASE("idempotent") {
    auto before = bmaps[0].allocations;
    calc_max_time(bmaps, slas);
    CHECK(bmaps[0].allocations == before);
  }

  SUBCASE("unknown sla_id is a configuration error") {
    bmaps[0].allocations[0].sla_id = 9;
    CHECK_THROWS_AS(calc_max_time(bmaps, slas), ConfigError);
  }
}

TEST_CASE("compare_alloc orders by breach, deadline, start, size, seq") {
  BreachTable breach;
  Allocation a = alloc(0, 1, 0, 100, 500, 5'000, 0);
  Allocation b = alloc(1, 2, 0, 100, 500, 6'000, 1);

  SUBCASE("earlier deadline wins when breaches tie") {
    CHECK(compare_alloc(a, b, breach));
    CHECK_FALSE(compare_alloc(b, a, breach));
  }

  SUBCASE("higher flow breach fraction beats an earlier deadline") {
    breach[b.flow()] = 0.2;
    CHECK(compare_alloc(b, a, breach));
  }

  SUBCASE("equal deadlines fall back to request start order") {
    b.max_time = a.max_time;
    b.start_time = 50;
    CHECK(compare_alloc(b, a, breach));
  }

  SUBCASE("best-effort traffic shares the sentinel and merges FCFS") {
    a.max_time = kInfNs;
    b.max_time = kInfNs;
    a.start_time = b.start_time = 100;
    a.size = b.size = 500;
    CHECK(compare_alloc(a, b, breach));  // seq 0 before seq 1
  }

  SUBCASE("smaller size breaks start-time ties") {
    b.max_time = a.max_time;
    b.size = 400;
    CHECK(compare_alloc(b, a, breach));
  }
}

TEST_CASE("ChannelTimeline backfills gaps left behind the tail") {
  ChannelTimeline t;
  CHECK(t.earliest_fit(0, 100) == 0);

  // A burst placed at 1000 leaves [0, 1000) as a reusable gap.
  t.occupy(1'000, 500);
  CHECK(t.tail_free() == 1'500);
  CHECK(t.gap_count() == 1);
  CHECK(t.earliest_fit(0, 800) == 0);
  CHECK(t.earliest_fit(0, 1'200) == 1'500);  // too wide for the gap
  CHECK(t.earliest_fit(600, 400) == 600);    // ready inside the gap

  // Filling part of the gap splits it.
  t.occupy(200, 300);
  CHECK(t.gap_count() == 2);
  CHECK(t.earliest_fit(0, 200) == 0);
  CHECK(t.earliest_fit(0, 300) == 500);

  SUBCASE("occupying booked time is an invariant error") {
    CHECK_THROWS_AS(t.occupy(250, 100), InvariantError);
    CHECK_THROWS_AS(t.occupy(1'100, 100), InvariantError);
  }

  SUBCASE("prune forgets gaps behind the horizon") {
    t.prune(600);
    CHECK(t.gap_count() == 1);
    CHECK(t.earliest_fit(0, 100) == 600);
    t.prune(2'000);
    CHECK(t.gap_count() == 0);
    CHECK(t.earliest_fit(0, 100) == 2'000);
  }
}

TEST_CASE("flow keys separate tenants and classes") {
  Allocation a = alloc(1, 5, 0, 0, 100, 0, 0);
  Allocation b = alloc(1, 9, 0, 0, 100, 0, 1);
  Allocation c = alloc(2, 5, 0, 0, 100, 0, 2);
  CHECK(a.flow() == b.flow());  // same tenant and class, different ONUs
  CHECK(a.flow() != c.flow());
  CHECK(FlowKey{1, 0} < FlowKey{1, 1});
}
