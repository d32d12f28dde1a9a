#pragma once

#include <cstddef>

#include "relaydiff/pipeline.hpp"
#include "relaydiff/scenario.hpp"
#include "relaydiff/scheduler.hpp"

namespace relaydiff {

struct SplitConfig {
  DeviceId device_a_id = 0;
  DeviceId device_b_id = 1;
  double split_fraction = 0.5;
  std::size_t n_steps = 5;

  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;
};

/// Two-segment split inference: every denoising step runs A's segment,
/// relays features A -> server -> B, runs B's segment, relays them back.
/// The trace has method "split", two segments as its stages and
/// `feasible == false` when totals exceed the budgets.
///
/// The model bytes credited to a split run are those of the smaller of the
/// two variants: the partitioned model cannot exceed the precision that
/// both halves hold.
SimTrace simulate_split(const Scenario& scenario, const SplitConfig& config, const Budgets& budgets);

/// Pair (A < B, split_fraction 0.5) over available devices minimizing total
/// split latency for `n_steps`, ties to the lowest id pair. The budgets do
/// not filter pairs; simulate_split flags an over-budget run instead.
SplitConfig pick_split_pair(const Scenario& scenario, const Budgets& budgets, std::size_t n_steps);

/// Fair-comparison step count: K per stage of the compared multi-stage plan.
std::size_t matched_split_steps(const Scenario& scenario, const SchedulePlan& plan);

}  // namespace relaydiff
