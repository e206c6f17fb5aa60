#pragma once
#include <cstdint>
#include <limits>

namespace twdm {

// All times are integer nanoseconds. Reporting layers convert to microseconds.
using Ns = std::int64_t;

constexpr Ns kFrameNs = 125'000;          // 125 us scheduling frame
constexpr Ns kGuardNs = 210;              // guard gap between upstream bursts
constexpr Ns kInfNs = std::numeric_limits<Ns>::max();  // best-effort latency sentinel

constexpr int kBreachWindowFrames = 8;    // 1 ms compliance window at 125 us frames

// One allocation unit is 160 bytes = 1280 bits; its duration depends on the
// channel line rate (51.2 ns at 25 Gb/s).
constexpr double kAllocUnitBits = 1280.0;

inline double au_duration_ns(double line_rate_gbps) {
  return kAllocUnitBits / line_rate_gbps;
}

constexpr Ns us_to_ns(double us) { return static_cast<Ns>(us * 1000.0 + 0.5); }
constexpr double ns_to_us(Ns ns) { return static_cast<double>(ns) / 1000.0; }

}  // namespace twdm
