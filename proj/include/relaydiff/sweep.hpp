#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaydiff/scenario.hpp"
#include "relaydiff/scheduler.hpp"

namespace relaydiff {

struct SweepSpec {
  std::vector<double> t_max_grid;
  std::vector<double> e_max_grid;
  std::vector<std::string> methods;  // subset of dp, no_ds, split, oracle
  std::size_t repetitions = 1;
};

/// t_max in {0.5..3.0} s, e_max in {50..300} J, methods dp, no_ds, split.
SweepSpec default_sweep_spec();

/// Grids non-empty and strictly ascending, known methods, repetitions >= 1.
void validate(const SweepSpec& spec);

struct SweepOptions {
  SweepSpec spec = default_sweep_spec();
  std::uint64_t base_seed = 42;
  /// When set, every repetition reuses this world and only failure draws
  /// vary; otherwise repetition r generates a world with seed base_seed + r.
  std::optional<Scenario> scenario;
  GenerateOptions generate;
  /// Held fixed over the whole grid so dp objectives are monotone in the
  /// budgets. Matches the per-budget default at T_max = 2 s, E_max = 200 J.
  Discretization discretization{0.01, 1.0};
  double failure_prob = 0.0;
  double split_fraction = 0.5;
  std::size_t jobs = 1;
};

struct SweepRow {
  double t_max_s = 0.0;
  double e_max_j = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t objective_bytes = 0;
  double quality_norm = 0.0;
  std::size_t n_stages = 0;
  double t_total_s = 0.0;
  double e_total_j = 0.0;
  double t_tran_s = 0.0;
  double t_cmp_s = 0.0;
  double tran_fraction = 0.0;
  bool feasible = false;
  std::size_t replans = 0;
};

/// One row per (t_max, e_max, method, repetition), sorted by
/// (t_max, e_max, method, seed). Cells that fail record feasible = false.
std::vector<SweepRow> run_sweep(const SweepOptions& options);

std::string sweep_csv_header();
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace relaydiff
