#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "twdm/harness.hpp"
#include "twdm/traffic.hpp"

using namespace twdm;

namespace {

TrafficGenerator make_generator(TrafficConfig cfg, ChannelPlan plan,
                                std::uint64_t seed = 7) {
  cfg.seed = seed;
  return TrafficGenerator(cfg, Topology::standard(seed), plan,
                          {kSlaClassA, kSlaClassB}, kBestEffortClass);
}

}  // namespace

TEST_CASE("standard topology spreads 64 ONUs over 5 tenants") {
  Topology t = Topology::standard(42);
  REQUIRE(t.vno_of_onu.size() == 64);
  std::map<int, int> count;
  for (int v : t.vno_of_onu) count[v]++;
  REQUIRE(count.size() == 5);
  std::vector<int> sizes;
  for (auto& [vno, n] : count) sizes.push_back(n);
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<int>{12, 13, 13, 13, 13});
  // Seeded shuffle: two seeds give different assignments.
  CHECK(Topology::standard(1).vno_of_onu != Topology::standard(2).vno_of_onu);
}

TEST_CASE("arrival samples stay inside the truncated support") {
  std::mt19937_64 rng(1);
  for (Distribution d : {Distribution::kUniform, Distribution::kPoisson,
                         Distribution::kZipfMandelbrot, Distribution::kPareto}) {
    TrafficConfig cfg;
    cfg.distribution = d;
    ArrivalSampler s(cfg);
    double lo = 1e9, hi = -1e9, acc = 0;
    const int n = 20'000;
    for (int i = 0; i < n; ++i) {
      double x = s.sample(rng);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      acc += x;
    }
    CAPTURE(distribution_name(d));
    CHECK(lo >= 0.0);
    CHECK(hi <= cfg.arrival_range_au);
    CHECK(acc / n == doctest::Approx(s.mean()).epsilon(0.05));
  }
}

TEST_CASE("uniform and Poisson arrivals average 10 allocation units") {
  TrafficConfig cfg;
  cfg.distribution = Distribution::kUniform;
  CHECK(ArrivalSampler(cfg).mean() == doctest::Approx(10.0).epsilon(0.001));
  cfg.distribution = Distribution::kPoisson;
  CHECK(ArrivalSampler(cfg).mean() == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("bin probabilities form a distribution aligned with bin_of") {
  std::mt19937_64 rng(3);
  for (Distribution d : {Distribution::kUniform, Distribution::kPoisson,
                         Distribution::kZipfMandelbrot, Distribution::kPareto}) {
    TrafficConfig cfg;
    cfg.distribution = d;
    ArrivalSampler s(cfg);
    auto probs = s.bin_probabilities();
    double sum = 0;
    for (double p : probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CAPTURE(distribution_name(d));
    CHECK(sum == doctest::Approx(1.0));
    for (int i = 0; i < 1'000; ++i) {
      int b = s.bin_of(s.sample(rng));
      REQUIRE(b >= 0);
      REQUIRE(b < static_cast<int>(probs.size()));
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  TrafficConfig cfg;
  cfg.load_fraction = 0.6;
  ChannelPlan plan{4, 50.0};
  TrafficGenerator a = make_generator(cfg, plan, 11);
  TrafficGenerator b = make_generator(cfg, plan, 11);
  TrafficGenerator c = make_generator(cfg, plan, 12);
  bool differs = false;
  for (long f = 0; f < 5; ++f) {
    auto fa = a.generate_frame(f), fb = b.generate_frame(f),
         fc = c.generate_frame(f);
    REQUIRE(fa.size() == fb.size());
    for (std::size_t v = 0; v < fa.size(); ++v) {
      CHECK(fa[v].allocations == fb[v].allocations);
      if (fa[v].allocations != fc[v].allocations) differs = true;
    }
  }
  CHECK(differs);
}

TEST_CASE("offered demand tracks the configured load") {
  for (double load : {0.2, 0.5, 0.8}) {
    TrafficConfig cfg;
    cfg.load_fraction = load;
    ChannelPlan plan{8, 25.0};
    TrafficGenerator gen = make_generator(cfg, plan);
    CHECK(gen.frame_budget() ==
          static_cast<Ns>(load * plan.n_channels * kFrameNs));
    long double busy = 0;
    const long frames = 200;
    for (long f = 0; f < frames; ++f)
      for (const auto& bmap : gen.generate_frame(f))
        for (const auto& a : bmap.allocations)
          busy += a.size + cfg.guard_time;
    // Occupancy (burst + guard) over total capacity approximates the load.
    double occupancy =
        static_cast<double>(busy) / (frames * plan.n_channels * kFrameNs);
    CAPTURE(load);
    CHECK(occupancy == doctest::Approx(load).epsilon(0.05));
  }
}

TEST_CASE("frames carry well-formed allocations") {
  TrafficConfig cfg;
  cfg.load_fraction = 0.8;
  cfg.sla_fraction = 0.7;
  ChannelPlan plan{8, 25.0};
  TrafficGenerator gen = make_generator(cfg, plan);
  Topology topo = Topology::standard(7);
  for (long f = 0; f < 50; ++f) {
    auto bmaps = gen.generate_frame(f);
    REQUIRE(bmaps.size() == 5);
    Ns frame_start = f * kFrameNs;
    for (const auto& bmap : bmaps) {
      for (const auto& a : bmap.allocations) {
        CHECK(a.vno_id == bmap.vno_id);
        CHECK(topo.vno_of_onu[a.onu_id] == a.vno_id);
        CHECK(a.start_time >= frame_start);
        CHECK(a.start_time < frame_start + 8 * kFrameNs);
        CHECK(a.size >= cfg.min_burst);
        CHECK(a.size <= cfg.max_burst);
      }
    }
  }
}

TEST_CASE("each ONU carries exactly one traffic class") {
  TrafficConfig cfg;
  cfg.sla_fraction = 0.6;
  ChannelPlan plan{4, 50.0};
  TrafficGenerator gen = make_generator(cfg, plan);
  std::map<int, int> class_of;
  for (long f = 0; f < 50; ++f)
    for (const auto& bmap : gen.generate_frame(f))
      for (const auto& a : bmap.allocations) {
        auto [it, fresh] = class_of.emplace(a.onu_id, a.sla_id);
        if (!fresh) CHECK(it->second == a.sla_id);
      }
  // The SLA share of ONUs matches the configured fraction.
  int sla_onus = 0;
  for (auto& [onu, cls] : class_of) sla_onus += cls != kBestEffortClass;
  CHECK(sla_onus == 38);  // llround(0.6 * 64)
}

TEST_CASE("sampler goodness of fit against its own bin model") {
  std::mt19937_64 rng(99);
  for (Distribution d : {Distribution::kUniform, Distribution::kPoisson,
                         Distribution::kZipfMandelbrot, Distribution::kPareto}) {
    TrafficConfig cfg;
    cfg.distribution = d;
    ArrivalSampler s(cfg);
    auto probs = s.bin_probabilities();
    std::vector<long> counts(probs.size(), 0);
    const long n = 100'000;
    for (long i = 0; i < n; ++i) ++counts[s.bin_of(s.sample(rng))];
    double chi2 = 0;
    int dof = -1;
    for (std::size_t b = 0; b < probs.size(); ++b) {
      double expected = probs[b] * n;
      if (expected < 5) continue;
      double diff = counts[b] - expected;
      chi2 += diff * diff / expected;
      ++dof;
    }
    CAPTURE(distribution_name(d));
    // Critical value at significance 0.01 for up to 20 degrees of freedom.
    CHECK(chi2 < 37.57);
    CHECK(dof > 5);
  }
}

TEST_CASE("invalid traffic configuration is rejected") {
  TrafficConfig cfg;
  cfg.load_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.load_fraction = 0.5;
  cfg.sla_fraction = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.sla_fraction = 0.5;
  cfg.min_burst = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
