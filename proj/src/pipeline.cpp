#include "relaydiff/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "relaydiff/errors.hpp"
#include "relaydiff/rng.hpp"

namespace relaydiff {
namespace {

class TraceBuilder {
 public:
  explicit TraceBuilder(SimTrace& trace) : trace_(trace) {}

  void phase(EventKind kind, DeviceId device, std::uint64_t amount, double seconds, double joules) {
    push(kind, device, amount, seconds);
    if (kind == EventKind::compute) {
      trace_.t_cmp_s += seconds;
    } else {
      trace_.t_tran_s += seconds;
    }
    trace_.e_total_j += joules;
  }

  TraceEvent& marker(EventKind kind, DeviceId device, std::uint64_t amount) {
    return push(kind, device, amount, 0.0);
  }

 private:
  TraceEvent& push(EventKind kind, DeviceId device, std::uint64_t amount, double seconds) {
    TraceEvent ev;
    ev.t_start_s = clock_;
    ev.t_end_s = clock_ + seconds;
    ev.kind = kind;
    ev.device_id = device;
    ev.amount = amount;
    clock_ = ev.t_end_s;
    trace_.events.push_back(ev);
    return trace_.events.back();
  }

  SimTrace& trace_;
  double clock_ = 0.0;
};

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::download: return "download";
    case Phase::compute: return "compute";
    case Phase::upload: return "upload";
  }
  return "unknown";
}

Phase phase_from_string(const std::string& name) {
  if (name == "download") return Phase::download;
  if (name == "compute") return Phase::compute;
  if (name == "upload") return Phase::upload;
  throw ConfigError("unknown failure phase '" + name + "'");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::download: return "download";
    case EventKind::compute: return "compute";
    case EventKind::upload: return "upload";
    case EventKind::transfer: return "transfer";
    case EventKind::checkpoint: return "checkpoint";
    case EventKind::failure: return "failure";
    case EventKind::replan: return "replan";
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& name) {
  for (EventKind k : {EventKind::download, EventKind::compute, EventKind::upload, EventKind::transfer,
                      EventKind::checkpoint, EventKind::failure, EventKind::replan}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown event kind '" + name + "'");
}

std::size_t SimTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const TraceEvent& e) { return e.kind == kind; }));
}

std::size_t SimTrace::transfer_events() const {
  return count(EventKind::download) + count(EventKind::upload) + count(EventKind::transfer);
}

RecoveryInfeasible::RecoveryInfeasible(SimTrace partial)
    : std::runtime_error("recovery infeasible: no available devices fit the residual budgets after " +
                         std::to_string(partial.stages_completed) + " completed stage(s)"),
      partial_(std::move(partial)) {}

void finalize_aggregates(SimTrace& trace) {
  trace.t_total_s = trace.t_tran_s + trace.t_cmp_s;
  trace.tran_fraction = trace.t_total_s > 0.0 ? trace.t_tran_s / trace.t_total_s : 0.0;
  trace.feasible = trace.complete && trace.t_total_s <= trace.budgets.t_max_s &&
                   trace.e_total_j <= trace.budgets.e_max_j;
}

SimTrace simulate_pipeline(const Scenario& scenario, const SchedulePlan& plan, const FailureSpec& failures,
                           const Budgets& budgets) {
  validate(budgets);
  if (!(failures.per_stage_prob >= 0.0 && failures.per_stage_prob < 1.0)) {
    throw ConfigError("per_stage_prob must lie in [0, 1)");
  }
  const std::vector<DeviceId> planned_ids = plan.device_ids();
  for (DeviceId id : planned_ids) {
    if (!scenario.has_device(id)) throw ConfigError("plan references unknown device " + std::to_string(id));
  }
  std::map<DeviceId, Phase> pending_failures;
  for (const InjectedFailure& f : failures.injected) {
    if (std::find(planned_ids.begin(), planned_ids.end(), f.device_id) == planned_ids.end()) {
      throw ConfigError("injected failure names device " + std::to_string(f.device_id) +
                        " which is not in the plan");
    }
    pending_failures.emplace(f.device_id, f.phase);
  }

  const Discretization replan_steps =
      plan.discretization ? plan.discretization->steps : Discretization::defaults_for(budgets);

  SimTrace trace;
  trace.method = to_string(plan.method);
  trace.budgets = budgets;
  trace.steps_per_stage = scenario.steps_per_stage;
  trace.stages_planned = plan.stages.size();
  TraceBuilder builder(trace);

  Scenario world = scenario;
  Rng rng(failures.rng_seed);
  std::vector<PlannedStage> queue = plan.stages;
  std::size_t next = 0;
  std::uint64_t checkpoint_seq = 0;
  const auto steps = static_cast<std::uint64_t>(scenario.steps_per_stage);

  while (next < queue.size()) {
    const PlannedStage& stage = queue[next];
    const DeviceId id = stage.device_id;
    const StageCost& c = stage.cost;

    std::optional<Phase> fail;
    if (auto it = pending_failures.find(id); it != pending_failures.end()) {
      fail = it->second;
      pending_failures.erase(it);
    } else if (failures.per_stage_prob > 0.0 && rng.bernoulli(failures.per_stage_prob)) {
      fail = static_cast<Phase>(rng.index(3));
    }

    builder.phase(EventKind::download, id, scenario.latent_bytes, c.t_down_s, c.e_down_j);
    if (fail != Phase::download) {
      builder.phase(EventKind::compute, id, steps, c.t_cmp_s, c.e_cmp_j);
      if (fail != Phase::compute) {
        builder.phase(EventKind::upload, id, scenario.latent_bytes, c.t_up_s, c.e_up_j);
      }
    }

    if (!fail) {
      builder.marker(EventKind::checkpoint, id, scenario.latent_bytes).checkpoint = ++checkpoint_seq;
      trace.objective_bytes += scenario.device(id).variant.size_bytes();
      ++trace.stages_completed;
      ++next;
      continue;
    }

    builder.marker(EventKind::failure, id, 0).phase = *fail;

    // The failed device is gone; devices already in the lineage keep their
    // stage and are not reassigned.
    world.device(id).available = false;
    for (const TraceEvent& ev : trace.events) {
      if (ev.kind == EventKind::checkpoint) world.device(ev.device_id).available = false;
    }
    const double elapsed = trace.t_tran_s + trace.t_cmp_s;
    const Budgets residual{std::max(0.0, budgets.t_max_s - elapsed),
                           std::max(0.0, budgets.e_max_j - trace.e_total_j)};
    SchedulePlan replacement = select_devices(plan.method, world, residual, replan_steps);
    ++trace.replans;
    builder.marker(EventKind::replan, id, replacement.stages.size()).checkpoint = checkpoint_seq;

    if (replacement.empty()) {
      trace.complete = false;
      finalize_aggregates(trace);
      throw RecoveryInfeasible(std::move(trace));
    }
    queue = std::move(replacement.stages);
    next = 0;
  }

  trace.complete = true;
  finalize_aggregates(trace);
  return trace;
}

std::vector<DeviceId> aggregate_latent_lineage(const SimTrace& trace) {
  if (!trace.complete) throw LineageError("trace is incomplete; the final latent was never produced");
  std::vector<DeviceId> lineage;
  std::set<DeviceId> seen;
  for (const TraceEvent& ev : trace.events) {
    if (ev.kind != EventKind::checkpoint) continue;
    if (!seen.insert(ev.device_id).second) {
      throw LineageError("device " + std::to_string(ev.device_id) + " appears twice in the lineage");
    }
    lineage.push_back(ev.device_id);
  }
  if (lineage.size() != trace.stages_completed) {
    throw LineageError("checkpoint count does not match completed stages");
  }
  return lineage;
}

}  // namespace relaydiff
