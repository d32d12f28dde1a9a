#include "relaydiff/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "relaydiff/errors.hpp"
#include "relaydiff/format.hpp"
#include "relaydiff/pipeline.hpp"
#include "relaydiff/quality.hpp"
#include "relaydiff/rng.hpp"
#include "relaydiff/split.hpp"

namespace relaydiff {
namespace {

const std::set<std::string>& known_methods() {
  static const std::set<std::string> names{"dp", "no_ds", "split", "oracle"};
  return names;
}

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw ConfigError(std::string(name) + " grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw ConfigError(std::string(name) + " grid values must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ConfigError(std::string(name) + " grid must be strictly ascending");
    }
  }
}

struct Cell {
  std::size_t rep;
  double t_max;
  double e_max;
  std::string method;
  std::uint64_t seed;
  std::uint64_t failure_seed;
};

void fill_from_trace(SweepRow& row, const SimTrace& trace, const Scenario& scenario) {
  row.objective_bytes = trace.objective_bytes;
  row.quality_norm = quality_of_bytes(trace.objective_bytes, scenario).normalized;
  row.n_stages = trace.stages_completed;
  row.t_total_s = trace.t_total_s;
  row.e_total_j = trace.e_total_j;
  row.t_tran_s = trace.t_tran_s;
  row.t_cmp_s = trace.t_cmp_s;
  row.tran_fraction = trace.tran_fraction;
  row.feasible = trace.feasible;
  row.replans = trace.replans;
}

SweepRow evaluate(const Cell& cell, const Scenario& scenario, const SweepOptions& options) {
  SweepRow row;
  row.t_max_s = cell.t_max;
  row.e_max_j = cell.e_max;
  row.method = cell.method;
  row.seed = cell.seed;
  const Budgets budgets{cell.t_max, cell.e_max};
  try {
    if (cell.method == "split") {
      const SchedulePlan reference = select_devices_dp(scenario, budgets, options.discretization);
      const std::size_t steps = matched_split_steps(scenario, reference);
      if (steps == 0) return row;  // nothing to compare against
      SplitConfig config = pick_split_pair(scenario, budgets, steps);
      config.split_fraction = options.split_fraction;
      fill_from_trace(row, simulate_split(scenario, config, budgets), scenario);
      return row;
    }
    const Method method = method_from_string(cell.method);
    const SchedulePlan plan = select_devices(method, scenario, budgets, options.discretization);
    const FailureSpec failures{{}, options.failure_prob, cell.failure_seed};
    fill_from_trace(row, simulate_pipeline(scenario, plan, failures, budgets), scenario);
  } catch (const RecoveryInfeasible& e) {
    fill_from_trace(row, e.partial_trace(), scenario);
    row.feasible = false;
  } catch (const ConfigError&) {
    row.feasible = false;
  }
  return row;
}

}  // namespace

SweepSpec default_sweep_spec() {
  return {{0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, {50.0, 100.0, 150.0, 200.0, 250.0, 300.0}, {"dp", "no_ds", "split"}, 1};
}

void validate(const SweepSpec& spec) {
  check_grid(spec.t_max_grid, "t_max");
  check_grid(spec.e_max_grid, "e_max");
  if (spec.methods.empty()) throw ConfigError("sweep needs at least one method");
  std::set<std::string> seen;
  for (const auto& m : spec.methods) {
    if (!known_methods().contains(m)) throw ConfigError("unknown sweep method '" + m + "'");
    if (!seen.insert(m).second) throw ConfigError("duplicate sweep method '" + m + "'");
  }
  if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

std::vector<SweepRow> run_sweep(const SweepOptions& options) {
  validate(options.spec);
  validate(options.discretization);
  const SweepSpec& spec = options.spec;

  std::vector<Scenario> worlds;
  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    if (options.scenario) {
      worlds.push_back(*options.scenario);
    } else {
      GenerateOptions gen = options.generate;
      gen.seed = options.base_seed + r;
      worlds.push_back(generate_scenario(gen));
    }
  }

  std::vector<Cell> cells;
  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    for (double t : spec.t_max_grid) {
      for (double e : spec.e_max_grid) {
        for (const auto& m : spec.methods) {
          const std::uint64_t index = cells.size();
          cells.push_back({r, t, e, m, options.base_seed + r, mix_seed(options.base_seed, index)});
        }
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = evaluate(cells[i], worlds[cells[i].rep], options);
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.t_max_s, a.e_max_j, a.method, a.seed) < std::tie(b.t_max_s, b.e_max_j, b.method, b.seed);
  });
  return rows;
}

std::string sweep_csv_header() {
  return "t_max_s,e_max_j,method,seed,objective_bytes,quality_norm,n_stages,t_total_s,e_total_j,t_tran_s,"
         "t_cmp_s,tran_fraction,feasible,replans";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const SweepRow& r : rows) {
    out << format_sig6(r.t_max_s) << ',' << format_sig6(r.e_max_j) << ',' << r.method << ',' << r.seed << ','
        << r.objective_bytes << ',' << format_sig6(r.quality_norm) << ',' << r.n_stages << ','
        << format_sig6(r.t_total_s) << ',' << format_sig6(r.e_total_j) << ',' << format_sig6(r.t_tran_s) << ','
        << format_sig6(r.t_cmp_s) << ',' << format_sig6(r.tran_fraction) << ','
        << (r.feasible ? "true" : "false") << ',' << r.replans << '\n';
  }
  return out.str();
}

}  // namespace relaydiff
