#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twdm/breach.hpp"

using namespace twdm;

namespace {

SlaTable table() {
  SlaTable slas;
  slas[0] = make_sla(0, 12.5, 0.90);   // threshold 0.10
  slas[1] = make_sla(1, 25.0, 0.95);   // threshold 0.05
  slas[2] = make_best_effort(2);
  return slas;
}

// One frame of n allocations for flow (vno, sla), `delayed` of them late.
ChannelSchedule frame(int vno, int sla, int n, int delayed) {
  ChannelSchedule out(1);
  for (int i = 0; i < n; ++i) {
    ScheduledAllocation s;
    s.alloc.vno_id = vno;
    s.alloc.sla_id = sla;
    s.alloc.onu_id = i;
    s.alloc.max_time = 1'000;
    s.sched_time = i < delayed ? 1'001 : 1'000;  // delayed iff strictly late
    out[0].push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("delayed is strict: sched_time == max_time is on time") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  tr.observe_frame(frame(0, 0, 10, 0));
  CHECK(tr.flows().at({0, 0}).sum_delayed == 0);
  tr.observe_frame(frame(0, 0, 10, 3));
  CHECK(tr.flows().at({0, 0}).sum_delayed == 3);
  CHECK(tr.flows().at({0, 0}).sum_total == 20);
}

TEST_CASE("breach is strict exceedance of the class threshold") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  // 1 late of 10 = 0.10, exactly at class 0's threshold: not breached.
  tr.observe_frame(frame(0, 0, 10, 1));
  CHECK(tr.flows().at({0, 0}).fraction == doctest::Approx(0.10));
  CHECK_FALSE(tr.flows().at({0, 0}).breached);
  CHECK(tr.compliance() == doctest::Approx(1.0));

  // 2 more late pushes the window fraction over the threshold.
  tr.observe_frame(frame(0, 0, 10, 2));
  CHECK(tr.flows().at({0, 0}).fraction == doctest::Approx(0.15));
  CHECK(tr.flows().at({0, 0}).breached);
  CHECK(tr.compliance() == doctest::Approx(0.5));  // 1 breached of 2 samples
}

TEST_CASE("window slides over 8 frames and old counts drop out") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  tr.observe_frame(frame(0, 1, 10, 10));
  for (int i = 0; i < kBreachWindowFrames - 1; ++i)
    tr.observe_frame(frame(0, 1, 10, 0));
  CHECK(tr.flows().at({0, 1}).sum_total == 80);
  CHECK(tr.flows().at({0, 1}).sum_delayed == 10);
  // The 9th frame evicts the all-delayed one.
  tr.observe_frame(frame(0, 1, 10, 0));
  CHECK(tr.flows().at({0, 1}).sum_delayed == 0);
  CHECK_FALSE(tr.flows().at({0, 1}).breached);
}

TEST_CASE("best-effort flows never breach and add no window samples") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  tr.observe_frame(frame(3, 2, 10, 10));
  CHECK_FALSE(tr.flows().at({3, 2}).breached);
  CHECK(tr.window_samples() == 0);
  CHECK(tr.compliance() == doctest::Approx(1.0));
  // The fraction is still tracked; the priority comparator may read it.
  CHECK(tr.fractions().at({3, 2}) == doctest::Approx(1.0));
}

TEST_CASE("windows without traffic are not counted as samples") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  tr.observe_frame(frame(0, 0, 4, 0));
  CHECK(tr.window_samples() == 1);
  // Flow (0,0) stays sampled while its window still holds traffic, even in
  // frames where it sends nothing.
  tr.observe_frame(frame(1, 0, 4, 0));
  CHECK(tr.window_samples() == 3);
  // After 8 idle frames flow (0,0)'s window is empty: no further samples.
  for (int i = 0; i < kBreachWindowFrames; ++i)
    tr.observe_frame(frame(1, 0, 4, 0));
  long samples = tr.window_samples();
  tr.observe_frame(frame(1, 0, 4, 0));
  CHECK(tr.window_samples() == samples + 1);
}

TEST_CASE("channel split does not change the result") {
  SlaTable slas = table();
  BreachTracker one(slas), two(slas);
  ChannelSchedule merged = frame(0, 0, 8, 2);
  one.observe_frame(merged);

  ChannelSchedule split(2);
  for (std::size_t i = 0; i < merged[0].size(); ++i)
    split[i % 2].push_back(merged[0][i]);
  two.observe_frame(split);

  CHECK(one.flows().at({0, 0}).sum_delayed ==
        two.flows().at({0, 0}).sum_delayed);
  CHECK(one.flows().at({0, 0}).sum_total == two.flows().at({0, 0}).sum_total);
  CHECK(one.compliance() == doctest::Approx(two.compliance()));
}

TEST_CASE("unknown sla_id in a schedule is a configuration error") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  CHECK_THROWS_AS(tr.observe_frame(frame(0, 7, 1, 0)), ConfigError);
}

TEST_CASE("breach events accumulate across windows") {
  SlaTable slas = table();
  BreachTracker tr(slas);
  for (int i = 0; i < 4; ++i) tr.observe_frame(frame(0, 0, 10, 5));
  CHECK(tr.flows().at({0, 0}).breach_events == 4);
  CHECK(tr.total_breach_events() == 4);
  CHECK(tr.breached_samples() == 4);
}
