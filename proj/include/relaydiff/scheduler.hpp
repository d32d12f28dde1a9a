#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaydiff/cost_model.hpp"
#include "relaydiff/scenario.hpp"

namespace relaydiff {

struct Budgets {
  double t_max_s = 2.0;
  double e_max_j = 200.0;

  friend bool operator==(const Budgets&, const Budgets&) = default;
};

/// Step sizes used to turn latency and energy into integer capacities.
struct Discretization {
  double dt_s = 0.01;
  double de_j = 1.0;

  /// budget / 200 on each axis (1.0 when the budget is zero).
  static Discretization defaults_for(const Budgets& budgets);

  friend bool operator==(const Discretization&, const Discretization&) = default;
};

struct DiscretizationInfo {
  Discretization steps;
  std::int64_t capacity_t = 0;
  std::int64_t capacity_e = 0;

  friend bool operator==(const DiscretizationInfo&, const DiscretizationInfo&) = default;
};

enum class Method { dp, oracle, no_ds };

std::string to_string(Method method);
/// Throws ConfigError on an unknown name.
Method method_from_string(const std::string& name);

struct PlannedStage {
  DeviceId device_id = 0;
  StageCost cost;

  friend bool operator==(const PlannedStage&, const PlannedStage&) = default;
};

/// Running sums in the order every component uses (stage by stage:
/// download, compute, upload), so plan totals and simulated totals agree
/// bit for bit.
struct CostTotals {
  double t_tran_s = 0.0;
  double t_cmp_s = 0.0;
  double e_total_j = 0.0;

  void add(const StageCost& c) {
    t_tran_s += c.t_down_s;
    e_total_j += c.e_down_j;
    t_cmp_s += c.t_cmp_s;
    e_total_j += c.e_cmp_j;
    t_tran_s += c.t_up_s;
    e_total_j += c.e_up_j;
  }

  double t_total_s() const { return t_tran_s + t_cmp_s; }

  bool fits(const Budgets& b) const { return t_total_s() <= b.t_max_s && e_total_j <= b.e_max_j; }
};

struct SchedulePlan {
  Method method = Method::dp;
  std::vector<PlannedStage> stages;  // ascending device id
  std::uint64_t objective_bytes = 0;
  double t_total_s = 0.0;
  double e_total_j = 0.0;
  Budgets budgets;
  std::optional<DiscretizationInfo> discretization;  // dp only

  bool empty() const { return stages.empty(); }
  std::vector<DeviceId> device_ids() const;
  bool feasible() const { return t_total_s <= budgets.t_max_s && e_total_j <= budgets.e_max_j; }

  friend bool operator==(const SchedulePlan&, const SchedulePlan&) = default;
};

/// Builds a plan for an explicit device set (sorted ascending), computing
/// stage costs from the scenario. Does not check feasibility.
SchedulePlan make_plan(const Scenario& scenario, std::vector<DeviceId> ids, const Budgets& budgets,
                       Method method);

/// Constraint-discretized 0/1 knapsack over (latency, energy) capacities.
/// Costs are rounded up and capacities down, so the returned plan is
/// feasible under exact costs. Ties in backtracking prefer skipping.
SchedulePlan select_devices_dp(const Scenario& scenario, const Budgets& budgets,
                               const Discretization& disc);

SchedulePlan select_devices_dp(const Scenario& scenario, const Budgets& budgets);

inline constexpr std::size_t kOracleDeviceLimit = 25;

/// Exhaustive search over subsets of available devices with exact
/// feasibility. Ties: fewer devices, then lexicographically smallest id set.
/// Throws ConfigError above kOracleDeviceLimit available devices.
SchedulePlan select_devices_oracle(const Scenario& scenario, const Budgets& budgets);

/// Baseline without device selection: admit available devices in id order
/// while cumulative exact costs fit; stop at the first misfit.
SchedulePlan select_devices_no_ds(const Scenario& scenario, const Budgets& budgets);

SchedulePlan select_devices(Method method, const Scenario& scenario, const Budgets& budgets,
                            const std::optional<Discretization>& disc = std::nullopt);

void validate(const Budgets& budgets);
void validate(const Discretization& disc);

std::string plan_to_string(const SchedulePlan& plan);
SchedulePlan plan_from_string(const std::string& text);
void save_plan(const SchedulePlan& plan, const std::filesystem::path& path);
SchedulePlan load_plan(const std::filesystem::path& path);

}  // namespace relaydiff
