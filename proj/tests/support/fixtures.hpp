#pragma once

// Shared fixtures and random instance generators for the test suites.

#include <cstdint>
#include <vector>

#include "relaydiff/rng.hpp"
#include "relaydiff/scenario.hpp"

namespace relaydiff::testing {

inline constexpr std::uint64_t kGB = 1'000'000'000;

// Rates so high that transfer terms vanish below one ulp of the stage sums.
inline constexpr double kInstantRate = 1.0e30;

/// Blank world with the given number of devices at the server position,
/// powers 1 W, step latency 0.1 s, 32-bit variants of 1e9 parameters.
inline Scenario blank_scenario(std::size_t n) {
  Scenario s;
  s.area_m = {100.0, 100.0};
  s.server_pos_m = {50.0, 50.0};
  s.latent_bytes = 262144;
  s.feature_bytes = 524288;
  s.steps_per_stage = 5;
  s.seed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Device d;
    d.id = static_cast<DeviceId>(i);
    d.pos_m = {50.0, 50.0};
    d.variant = {32, 1'000'000'000};
    d.step_latency_s = 0.1;
    d.compute_power_w = 1.0;
    d.tx_power_w = 1.0;
    d.rx_power_w = 1.0;
    d.profile = "test";
    s.devices.push_back(d);
  }
  return s;
}

/// Device whose stage costs (K = 1, instant links) are exactly
/// t_total = latency_s and e_total = energy_j.
inline void shape_device(Scenario& s, DeviceId id, std::uint64_t size_bytes, double latency_s,
                         double energy_j) {
  Device& d = s.devices[id];
  // 8-bit variant: size_bytes == param_count.
  d.variant = {8, size_bytes};
  d.step_latency_s = latency_s;
  d.compute_power_w = energy_j / latency_s;
  s.link.rate_override_bps[id] = {kInstantRate, kInstantRate};
}

/// The three-device scheduling fixture:
///   A (id 0): 4 GB, 1.0 s, 100 J
///   B (id 1): 2 GB, 0.6 s,  60 J
///   C (id 2): 3 GB, 0.9 s,  80 J
inline Scenario three_device_fixture() {
  Scenario s = blank_scenario(3);
  s.steps_per_stage = 1;
  shape_device(s, 0, 4 * kGB, 1.0, 100.0);
  shape_device(s, 1, 2 * kGB, 0.6, 60.0);
  shape_device(s, 2, 3 * kGB, 0.9, 80.0);
  return s;
}

/// Random world with n devices of heterogeneous variants, positions and
/// hardware; a fraction of devices get random asymmetric rate overrides.
inline Scenario random_scenario(Rng& rng, std::size_t n) {
  Scenario s;
  s.area_m = {500.0, 500.0};
  s.server_pos_m = {250.0, 250.0};
  s.latent_bytes = 1024 * (1 + rng.index(512));
  s.feature_bytes = s.latent_bytes * (1 + rng.index(3));
  s.steps_per_stage = static_cast<int>(1 + rng.index(8));
  s.seed = rng.next();
  for (std::size_t i = 0; i < n; ++i) {
    Device d;
    d.id = static_cast<DeviceId>(i);
    d.pos_m = {rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0)};
    d.variant = {kAllowedBitWidths[rng.index(4)], 1'000'000'000};
    d.step_latency_s = rng.uniform(0.01, 0.2);
    d.compute_power_w = rng.uniform(5.0, 40.0);
    d.tx_power_w = rng.uniform(0.2, 2.0);
    d.rx_power_w = rng.uniform(0.1, 1.0);
    d.available = rng.uniform01() > 0.1;
    d.profile = "random";
    if (rng.uniform01() < 0.3) {
      s.link.rate_override_bps[d.id] = {rng.uniform(1e6, 1e8), rng.uniform(1e6, 1e8)};
    }
    s.devices.push_back(d);
  }
  return s;
}

/// Random world whose stage costs are exact integer multiples of
/// (dt, de) = (1/8 s, 1/2 J): K = 1, instant links, dyadic latencies and
/// powers. Every sum involved is exact in binary floating point.
inline Scenario multiple_scenario(Rng& rng, std::size_t n) {
  Scenario s = blank_scenario(n);
  s.steps_per_stage = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<DeviceId>(i);
    const double latency = 0.125 * static_cast<double>(1 + rng.index(16));
    const double power = static_cast<double>(4 * (1 + rng.index(16)));  // energy = multiple of 0.5
    Device& d = s.devices[i];
    d.variant = {kAllowedBitWidths[rng.index(4)], 1'000'000'000};
    d.step_latency_s = latency;
    d.compute_power_w = power;
    d.rx_power_w = 1.0;
    d.tx_power_w = 1.0;
    // 2^-60 s transfers are absorbed by stage sums of at least 2^-3.
    s.link.rate_override_bps[id] = {kInstantRate, kInstantRate};
  }
  return s;
}

struct BruteForceResult {
  std::uint64_t best_size = 0;
  std::vector<std::vector<DeviceId>> optimal_sets;  // every subset reaching best_size
};

/// Plain subset enumeration over explicit per-device (size, latency, energy)
/// triples, written without any library scheduling code.
struct Item {
  DeviceId id;
  std::uint64_t size;
  double latency;
  double energy;
};

inline BruteForceResult brute_force(const std::vector<Item>& items, double t_max, double e_max) {
  BruteForceResult out;
  const std::size_t n = items.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t size = 0;
    double t = 0.0;
    double e = 0.0;
    std::vector<DeviceId> set;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::uint64_t{1} << j)) {
        size += items[j].size;
        t += items[j].latency;
        e += items[j].energy;
        set.push_back(items[j].id);
      }
    }
    if (t > t_max || e > e_max) continue;
    if (size > out.best_size) {
      out.best_size = size;
      out.optimal_sets.clear();
    }
    if (size == out.best_size) out.optimal_sets.push_back(set);
  }
  return out;
}

}  // namespace relaydiff::testing
