#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaydiff/scenario.hpp"
#include "relaydiff/scheduler.hpp"

namespace relaydiff {

enum class Phase { download, compute, upload };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& name);

struct InjectedFailure {
  DeviceId device_id = 0;
  Phase phase = Phase::compute;

  friend bool operator==(const InjectedFailure&, const InjectedFailure&) = default;
};

struct FailureSpec {
  std::vector<InjectedFailure> injected;  // each fires at most once, before random draws
  double per_stage_prob = 0.0;            // in [0, 1)
  std::uint64_t rng_seed = 0;
};

enum class EventKind { download, compute, upload, transfer, checkpoint, failure, replan };

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

/// One entry of the trace. `amount` is bytes for data movement, denoising
/// steps for compute, the latent size for checkpoints and the number of
/// newly planned stages for replans.
struct TraceEvent {
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  EventKind kind = EventKind::download;
  DeviceId device_id = 0;
  std::uint64_t amount = 0;
  std::optional<DeviceId> peer_id;          // receiver of a relayed transfer
  std::optional<Phase> phase;               // failure events
  std::optional<std::uint64_t> checkpoint;  // sequence number; 0 = initial noise

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SimTrace {
  std::string method;
  std::vector<TraceEvent> events;
  double t_total_s = 0.0;
  double e_total_j = 0.0;
  double t_tran_s = 0.0;
  double t_cmp_s = 0.0;
  double tran_fraction = 0.0;
  std::uint64_t objective_bytes = 0;  // model bytes that actually contributed
  std::size_t stages_planned = 0;
  std::size_t stages_completed = 0;
  std::size_t replans = 0;
  int steps_per_stage = 0;
  Budgets budgets;
  bool complete = false;
  bool feasible = false;  // complete and within budgets

  std::size_t transfer_events() const;
  std::size_t count(EventKind kind) const;

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Raised when a failure leaves no feasible replacement. Carries the trace
/// up to and including the failed replan.
class RecoveryInfeasible : public std::runtime_error {
 public:
  explicit RecoveryInfeasible(SimTrace partial);
  const SimTrace& partial_trace() const noexcept { return partial_; }

 private:
  SimTrace partial_;
};

/// Runs the plan's stages in order (download, K steps, upload). The server
/// checkpoints every completed upload. On failure the device is dropped, the
/// last checkpoint restored, and the plan's method re-run over the unused
/// available devices with the residual budgets. Re-planning keeps the plan's
/// discretization steps when it has them.
SimTrace simulate_pipeline(const Scenario& scenario, const SchedulePlan& plan, const FailureSpec& failures,
                           const Budgets& budgets);

/// Devices whose uploads make up the final latent, in stage order.
/// Throws LineageError for an incomplete trace.
std::vector<DeviceId> aggregate_latent_lineage(const SimTrace& trace);

/// Fills the derived aggregates (t_total_s, tran_fraction, feasible).
void finalize_aggregates(SimTrace& trace);

std::string trace_to_string(const SimTrace& trace);
SimTrace trace_from_string(const std::string& text);
void save_trace(const SimTrace& trace, const std::filesystem::path& path);

/// Flat CSV record of a trace's aggregates.
std::string trace_summary_header();
std::string trace_summary_row(const SimTrace& trace);

}  // namespace relaydiff
