#include "relaydiff/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "relaydiff/errors.hpp"

namespace relaydiff {
namespace {

// (I+1) x (C_T+1) x (C_E+1) cells of 8 bytes; 2^27 cells is 1 GiB.
constexpr std::uint64_t kMaxTableCells = std::uint64_t{1} << 27;

struct Candidate {
  DeviceId id;
  std::uint64_t size;
  StageCost cost;
};

std::vector<Candidate> available_candidates(const Scenario& scenario) {
  std::vector<Candidate> out;
  for (const Device& d : scenario.devices) {
    if (d.available) out.push_back({d.id, d.variant.size_bytes(), stage_cost(scenario, d)});
  }
  return out;
}

// Largest c with c * step <= budget.
std::int64_t capacity_units(double budget, double step) {
  const double ratio = std::floor(budget / step);
  if (ratio >= static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw ConfigError("discretized capacity too large; increase the step size");
  }
  auto c = static_cast<std::int64_t>(ratio);
  while (static_cast<double>(c + 1) * step <= budget) ++c;
  while (c > 0 && static_cast<double>(c) * step > budget) --c;
  return c;
}

// Smallest u with u * step >= value, or `cap + 1` when that exceeds cap.
std::int64_t cost_units(double value, double step, std::int64_t cap) {
  if (value <= 0.0) return 0;
  const double ratio = std::ceil(value / step);
  if (ratio > static_cast<double>(cap)) return cap + 1;
  auto u = static_cast<std::int64_t>(ratio);
  while (u > 0 && static_cast<double>(u - 1) * step >= value) --u;
  while (static_cast<double>(u) * step < value) ++u;
  return std::min(u, cap + 1);
}

}  // namespace

Discretization Discretization::defaults_for(const Budgets& budgets) {
  return {budgets.t_max_s > 0.0 ? budgets.t_max_s / 200.0 : 1.0,
          budgets.e_max_j > 0.0 ? budgets.e_max_j / 200.0 : 1.0};
}

std::string to_string(Method method) {
  switch (method) {
    case Method::dp: return "dp";
    case Method::oracle: return "oracle";
    case Method::no_ds: return "no_ds";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "dp") return Method::dp;
  if (name == "oracle") return Method::oracle;
  if (name == "no_ds") return Method::no_ds;
  throw ConfigError("unknown scheduling method '" + name + "'");
}

std::vector<DeviceId> SchedulePlan::device_ids() const {
  std::vector<DeviceId> ids;
  ids.reserve(stages.size());
  for (const auto& s : stages) ids.push_back(s.device_id);
  return ids;
}

void validate(const Budgets& budgets) {
  if (!(budgets.t_max_s >= 0.0) || !std::isfinite(budgets.t_max_s)) {
    throw ConfigError("t_max_s must be a finite value >= 0");
  }
  if (!(budgets.e_max_j >= 0.0) || !std::isfinite(budgets.e_max_j)) {
    throw ConfigError("e_max_j must be a finite value >= 0");
  }
}

void validate(const Discretization& disc) {
  if (!(disc.dt_s > 0.0) || !std::isfinite(disc.dt_s)) throw ConfigError("dt_s must be > 0");
  if (!(disc.de_j > 0.0) || !std::isfinite(disc.de_j)) throw ConfigError("de_j must be > 0");
}

SchedulePlan make_plan(const Scenario& scenario, std::vector<DeviceId> ids, const Budgets& budgets,
                       Method method) {
  std::sort(ids.begin(), ids.end());
  SchedulePlan plan;
  plan.method = method;
  plan.budgets = budgets;
  CostTotals totals;
  for (DeviceId id : ids) {
    const Device& d = scenario.device(id);
    PlannedStage stage{id, stage_cost(scenario, d)};
    totals.add(stage.cost);
    plan.objective_bytes += d.variant.size_bytes();
    plan.stages.push_back(stage);
  }
  plan.t_total_s = totals.t_total_s();
  plan.e_total_j = totals.e_total_j;
  return plan;
}

SchedulePlan select_devices_dp(const Scenario& scenario, const Budgets& budgets,
                               const Discretization& disc) {
  validate(budgets);
  validate(disc);
  const std::vector<Candidate> items = available_candidates(scenario);
  const std::int64_t cap_t = capacity_units(budgets.t_max_s, disc.dt_s);
  const std::int64_t cap_e = capacity_units(budgets.e_max_j, disc.de_j);

  const std::size_t n = items.size();
  const auto width_t = static_cast<std::size_t>(cap_t + 1);
  const auto width_e = static_cast<std::size_t>(cap_e + 1);
  const std::uint64_t cells = static_cast<std::uint64_t>(n + 1) * width_t * width_e;
  if (cells > kMaxTableCells) {
    throw ConfigError("DP table of " + std::to_string(cells) +
                      " cells exceeds the limit; use coarser discretization");
  }

  std::vector<std::int64_t> ct(n), ce(n);
  for (std::size_t j = 0; j < n; ++j) {
    ct[j] = cost_units(items[j].cost.t_total(), disc.dt_s, cap_t);
    ce[j] = cost_units(items[j].cost.e_total(), disc.de_j, cap_e);
  }

  // table[j][t][e]: best total size using the first j candidates within
  // t latency units and e energy units.
  const std::size_t layer = width_t * width_e;
  std::vector<std::uint64_t> table(static_cast<std::size_t>(cells), 0);
  auto at = [&](std::size_t j, std::int64_t t, std::int64_t e) -> std::uint64_t& {
    return table[j * layer + static_cast<std::size_t>(t) * width_e + static_cast<std::size_t>(e)];
  };

  for (std::size_t j = 1; j <= n; ++j) {
    const std::int64_t wt = ct[j - 1];
    const std::int64_t we = ce[j - 1];
    const std::uint64_t size = items[j - 1].size;
    for (std::int64_t t = 0; t <= cap_t; ++t) {
      for (std::int64_t e = 0; e <= cap_e; ++e) {
        std::uint64_t best = at(j - 1, t, e);
        if (t >= wt && e >= we) best = std::max(best, at(j - 1, t - wt, e - we) + size);
        at(j, t, e) = best;
      }
    }
  }

  std::vector<DeviceId> chosen;
  std::int64_t t = cap_t;
  std::int64_t e = cap_e;
  for (std::size_t j = n; j >= 1; --j) {
    if (at(j, t, e) == at(j - 1, t, e)) continue;
    chosen.push_back(items[j - 1].id);
    t -= ct[j - 1];
    e -= ce[j - 1];
  }

  SchedulePlan plan = make_plan(scenario, std::move(chosen), budgets, Method::dp);
  plan.discretization = DiscretizationInfo{disc, cap_t, cap_e};
  if (plan.objective_bytes != at(n, cap_t, cap_e) || !plan.feasible()) {
    throw std::logic_error("dp backtracking produced an inconsistent plan");
  }
  return plan;
}

SchedulePlan select_devices_dp(const Scenario& scenario, const Budgets& budgets) {
  return select_devices_dp(scenario, budgets, Discretization::defaults_for(budgets));
}

SchedulePlan select_devices_oracle(const Scenario& scenario, const Budgets& budgets) {
  validate(budgets);
  const std::vector<Candidate> items = available_candidates(scenario);
  const std::size_t n = items.size();
  if (n > kOracleDeviceLimit) {
    throw ConfigError("oracle refuses " + std::to_string(n) + " available devices (limit " +
                      std::to_string(kOracleDeviceLimit) + ")");
  }

  std::uint64_t best_mask = 0;
  std::uint64_t best_size = 0;
  int best_count = 0;
  auto lex_less = [&](std::uint64_t a, std::uint64_t b) {
    // Ascending-id vectors compare lexicographically; with equal popcounts
    // the first differing lowest bit decides.
    const std::uint64_t diff = a ^ b;
    const std::uint64_t low = diff & (~diff + 1);
    return (a & low) != 0;
  };

  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    std::uint64_t size = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) size += items[j].size;
    }
    const int count = std::popcount(mask);
    if (size < best_size) continue;
    if (size == best_size && (count > best_count || (count == best_count && !lex_less(mask, best_mask)))) {
      continue;
    }
    CostTotals totals;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) totals.add(items[j].cost);
    }
    if (!totals.fits(budgets)) continue;
    best_mask = mask;
    best_size = size;
    best_count = count;
  }

  std::vector<DeviceId> chosen;
  for (std::size_t j = 0; j < n; ++j) {
    if (best_mask >> j & 1U) chosen.push_back(items[j].id);
  }
  return make_plan(scenario, std::move(chosen), budgets, Method::oracle);
}

SchedulePlan select_devices_no_ds(const Scenario& scenario, const Budgets& budgets) {
  validate(budgets);
  std::vector<DeviceId> admitted;
  CostTotals totals;
  for (const Candidate& c : available_candidates(scenario)) {
    CostTotals next = totals;
    next.add(c.cost);
    if (!next.fits(budgets)) break;
    totals = next;
    admitted.push_back(c.id);
  }
  return make_plan(scenario, std::move(admitted), budgets, Method::no_ds);
}

SchedulePlan select_devices(Method method, const Scenario& scenario, const Budgets& budgets,
                            const std::optional<Discretization>& disc) {
  switch (method) {
    case Method::dp:
      return select_devices_dp(scenario, budgets, disc.value_or(Discretization::defaults_for(budgets)));
    case Method::oracle: return select_devices_oracle(scenario, budgets);
    case Method::no_ds: return select_devices_no_ds(scenario, budgets);
  }
  throw ConfigError("unknown scheduling method");
}

}  // namespace relaydiff
