#include "relaydiff/split.hpp"

#include <algorithm>

#include "relaydiff/cost_model.hpp"
#include "relaydiff/errors.hpp"

namespace relaydiff {
namespace {

void check_config(const Scenario& scenario, const SplitConfig& config) {
  if (!scenario.has_device(config.device_a_id) || !scenario.has_device(config.device_b_id)) {
    throw ConfigError("split devices must exist in the scenario");
  }
  if (config.device_a_id == config.device_b_id) throw ConfigError("split devices must be distinct");
  if (config.n_steps < 1) throw ConfigError("split n_steps must be >= 1");
  if (!(config.split_fraction >= 0.0 && config.split_fraction <= 1.0)) {
    throw ConfigError("split_fraction must lie in [0, 1]");
  }
}

}  // namespace

SimTrace simulate_split(const Scenario& scenario, const SplitConfig& config, const Budgets& budgets) {
  validate(budgets);
  check_config(scenario, config);
  const Device& a = scenario.device(config.device_a_id);
  const Device& b = scenario.device(config.device_b_id);
  const SplitStepCost step = split_step_cost(a, b, scenario.server_pos_m, scenario.link,
                                             scenario.feature_bytes, config.split_fraction);

  SimTrace trace;
  trace.method = "split";
  trace.budgets = budgets;
  trace.steps_per_stage = scenario.steps_per_stage;
  trace.stages_planned = 2;

  double clock = 0.0;
  auto emit = [&](EventKind kind, DeviceId device, std::uint64_t amount, double seconds,
                  std::optional<DeviceId> peer) {
    TraceEvent ev;
    ev.t_start_s = clock;
    ev.t_end_s = clock + seconds;
    ev.kind = kind;
    ev.device_id = device;
    ev.amount = amount;
    ev.peer_id = peer;
    clock = ev.t_end_s;
    trace.events.push_back(ev);
  };

  trace.events.reserve(config.n_steps * 4);
  for (std::size_t i = 0; i < config.n_steps; ++i) {
    emit(EventKind::compute, a.id, 1, step.a.t_cmp_s, std::nullopt);
    trace.t_cmp_s += step.a.t_cmp_s;
    trace.e_total_j += step.a.e_cmp_j;

    emit(EventKind::transfer, a.id, scenario.feature_bytes, step.transfer_ab_s(), b.id);
    trace.t_tran_s += step.transfer_ab_s();
    trace.e_total_j += step.a.e_up_j;
    trace.e_total_j += step.b.e_down_j;

    emit(EventKind::compute, b.id, 1, step.b.t_cmp_s, std::nullopt);
    trace.t_cmp_s += step.b.t_cmp_s;
    trace.e_total_j += step.b.e_cmp_j;

    emit(EventKind::transfer, b.id, scenario.feature_bytes, step.transfer_ba_s(), a.id);
    trace.t_tran_s += step.transfer_ba_s();
    trace.e_total_j += step.b.e_up_j;
    trace.e_total_j += step.a.e_down_j;
  }

  trace.stages_completed = 2;
  trace.objective_bytes = std::min(a.variant.size_bytes(), b.variant.size_bytes());
  trace.complete = true;
  finalize_aggregates(trace);
  return trace;
}

SplitConfig pick_split_pair(const Scenario& scenario, const Budgets& /*budgets*/, std::size_t n_steps) {
  std::vector<DeviceId> ids;
  for (const Device& d : scenario.devices) {
    if (d.available) ids.push_back(d.id);
  }
  if (ids.size() < 2) throw ConfigError("split inference needs at least 2 available devices");
  if (n_steps < 1) throw ConfigError("split n_steps must be >= 1");

  std::optional<SplitConfig> best;
  double best_latency = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const Device& a = scenario.device(ids[i]);
      const Device& b = scenario.device(ids[j]);
      const SplitStepCost step =
          split_step_cost(a, b, scenario.server_pos_m, scenario.link, scenario.feature_bytes, 0.5);
      const double latency = static_cast<double>(n_steps) * step.t_step_s();
      // Strict comparison keeps the lowest id pair on ties.
      if (!best || latency < best_latency) {
        best = SplitConfig{a.id, b.id, 0.5, n_steps};
        best_latency = latency;
      }
    }
  }
  return *best;
}

std::size_t matched_split_steps(const Scenario& scenario, const SchedulePlan& plan) {
  return static_cast<std::size_t>(scenario.steps_per_stage) * plan.stages.size();
}

}  // namespace relaydiff
