// relaydiff: scenario generation, device selection, relay/split simulation
// and budget sweeps from the command line.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "relaydiff/errors.hpp"
#include "relaydiff/format.hpp"
#include "relaydiff/pipeline.hpp"
#include "relaydiff/quality.hpp"
#include "relaydiff/scenario.hpp"
#include "relaydiff/scheduler.hpp"
#include "relaydiff/split.hpp"
#include "relaydiff/sweep.hpp"

namespace {

using namespace relaydiff;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kValidation = 3,
  kConfig = 4,
  kRecoveryInfeasible = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(g.out);
  if (!file) throw ConfigError("cannot write " + g.out);
  file << text;
}

Area parse_area(const std::vector<double>& dims) {
  if (dims.size() == 1) return {dims[0], dims[0]};
  return {dims[0], dims[1]};
}

InjectedFailure parse_failure(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--fail expects ID:PHASE, got '" + text + "'");
  try {
    std::size_t used = 0;
    const unsigned long id = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("id");
    return {static_cast<DeviceId>(id), phase_from_string(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--fail expects ID:PHASE with PHASE in {download,compute,upload}, got '" + text + "'");
  }
}

std::string plan_csv(const SchedulePlan& plan) {
  std::string out = "device_id,t_down_s,t_cmp_s,t_up_s,e_down_j,e_cmp_j,e_up_j\n";
  for (const auto& s : plan.stages) {
    out += std::to_string(s.device_id) + ',' + format_sig6(s.cost.t_down_s) + ',' + format_sig6(s.cost.t_cmp_s) +
           ',' + format_sig6(s.cost.t_up_s) + ',' + format_sig6(s.cost.e_down_j) + ',' +
           format_sig6(s.cost.e_cmp_j) + ',' + format_sig6(s.cost.e_up_j) + '\n';
  }
  return out;
}

void print_plan_summary(const SchedulePlan& plan, const Scenario& scenario) {
  const QualityScore q = quality(plan, scenario);
  std::cerr << to_string(plan.method) << ": " << plan.stages.size() << " stage(s), objective "
            << plan.objective_bytes << " B (quality " << format_sig6(q.normalized) << "), t_total "
            << format_sig6(plan.t_total_s) << " s, e_total " << format_sig6(plan.e_total_j) << " J\n";
}

void emit_trace(const GlobalOptions& g, const SimTrace& trace) {
  std::cout << trace_summary_header() << '\n' << trace_summary_row(trace) << '\n';
  if (g.out.empty()) return;
  if (g.format == "csv") {
    emit(g, trace_summary_header() + "\n" + trace_summary_row(trace) + "\n");
  } else {
    emit(g, trace_to_string(trace));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-assisted multi-stage diffusion: scheduling, simulation and sweeps"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("-o,--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario", "Generate a random scenario file");
  std::size_t n_devices = 20;
  std::vector<double> area{500.0};
  std::string profile = "default";
  std::optional<double> class_mix;
  gen->add_option("--devices", n_devices, "Number of devices")->check(CLI::PositiveNumber);
  gen->add_option("--area", area, "Area side, or width height, in meters")
      ->expected(1, 2)
      ->check(CLI::PositiveNumber);
  gen->add_option("--profile", profile, "Device profile (default, xavier, orin)");
  gen->add_option("--class-mix", class_mix, "Share of devices in the first hardware class")
      ->check(CLI::Range(0.0, 1.0));

  // schedule / oracle
  std::string scenario_path;
  std::string plan_path;
  double t_max = 2.0;
  double e_max = 200.0;
  std::string method = "dp";
  std::optional<double> dt;
  std::optional<double> de;
  auto add_budget_flags = [&](CLI::App* cmd) {
    cmd->add_option("--t-max", t_max, "Latency budget in seconds")->check(CLI::NonNegativeNumber);
    cmd->add_option("--e-max", e_max, "Energy budget in joules")->check(CLI::NonNegativeNumber);
  };

  auto* schedule = app.add_subcommand("schedule", "Select devices and write a plan");
  schedule->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  add_budget_flags(schedule);
  schedule->add_option("--method", method, "dp, oracle or no_ds")->check(CLI::IsMember({"dp", "oracle", "no_ds"}));
  schedule->add_option("--dt", dt, "Latency step in seconds (default t_max/200)")->check(CLI::PositiveNumber);
  schedule->add_option("--de", de, "Energy step in joules (default e_max/200)")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle", "Exhaustive selection, compared against dp");
  oracle->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  add_budget_flags(oracle);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a relay pipeline run");
  std::vector<std::string> fail_specs;
  double fail_prob = 0.0;
  bool budgets_given = false;
  simulate->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("-p,--plan", plan_path, "Plan file (scheduled with dp when omitted)");
  simulate->add_option("--t-max", t_max, "Latency budget in seconds")->check(CLI::NonNegativeNumber);
  simulate->add_option("--e-max", e_max, "Energy budget in joules")->check(CLI::NonNegativeNumber);
  simulate->add_option("--fail", fail_specs, "Inject a failure, ID:PHASE (repeatable)");
  simulate->add_option("--fail-prob", fail_prob, "Per-stage random failure probability")
      ->check(CLI::Range(0.0, 0.999999));

  // split
  auto* split = app.add_subcommand("split", "Simulate the two-segment split baseline");
  std::optional<DeviceId> dev_a;
  std::optional<DeviceId> dev_b;
  double phi = 0.5;
  std::optional<std::size_t> split_steps;
  split->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  add_budget_flags(split);
  split->add_option("--a", dev_a, "First segment device (picked when omitted)");
  split->add_option("--b", dev_b, "Second segment device (picked when omitted)");
  split->add_option("--phi", phi, "Share of each step run on the first device")->check(CLI::Range(0.0, 1.0));
  split->add_option("--steps", split_steps, "Denoising steps (default K x dp stage count)")
      ->check(CLI::PositiveNumber);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Budget sweep emitting CSV");
  SweepOptions sweep_opts;
  std::vector<double> area_sweep{500.0};
  sweep->add_option("-s,--scenario", scenario_path, "Scenario file (generated per repetition when omitted)");
  sweep->add_option("--devices", sweep_opts.generate.n_devices, "Devices per generated scenario")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--area", area_sweep, "Area side, or width height")->expected(1, 2)->check(CLI::PositiveNumber);
  sweep->add_option("--profile", sweep_opts.generate.profile, "Device profile");
  sweep->add_option("--t-max-grid", sweep_opts.spec.t_max_grid, "Latency budgets")->delimiter(',');
  sweep->add_option("--e-max-grid", sweep_opts.spec.e_max_grid, "Energy budgets")->delimiter(',');
  sweep->add_option("--methods", sweep_opts.spec.methods, "Subset of dp,no_ds,split,oracle")->delimiter(',');
  sweep->add_option("--reps", sweep_opts.spec.repetitions, "Repetitions with distinct seeds")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--fail-prob", sweep_opts.failure_prob, "Per-stage random failure probability")
      ->check(CLI::Range(0.0, 0.999999));
  sweep->add_option("--dt", sweep_opts.discretization.dt_s, "Fixed latency step")->check(CLI::PositiveNumber);
  sweep->add_option("--de", sweep_opts.discretization.de_j, "Fixed energy step")->check(CLI::PositiveNumber);
  sweep->add_option("--phi", sweep_opts.split_fraction, "Split fraction for split rows")
      ->check(CLI::Range(0.0, 1.0));
  sweep_opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) {
      GenerateOptions options;
      options.n_devices = n_devices;
      options.area_m = parse_area(area);
      options.seed = g.seed.value_or(42);
      options.profile = profile;
      options.class_mix = class_mix;
      const Scenario scenario = generate_scenario(options);
      emit(g, scenario_to_string(scenario));
      if (!g.out.empty()) std::cout << g.out << '\n';
      return kOk;
    }

    if (*schedule) {
      const Scenario scenario = load_scenario(scenario_path);
      const Budgets budgets{t_max, e_max};
      std::optional<Discretization> disc;
      if (dt || de) {
        const Discretization base = Discretization::defaults_for(budgets);
        disc = Discretization{dt.value_or(base.dt_s), de.value_or(base.de_j)};
      }
      const SchedulePlan plan = select_devices(method_from_string(method), scenario, budgets, disc);
      print_plan_summary(plan, scenario);
      emit(g, g.format == "csv" ? plan_csv(plan) : plan_to_string(plan));
      return kOk;
    }

    if (*oracle) {
      const Scenario scenario = load_scenario(scenario_path);
      const Budgets budgets{t_max, e_max};
      const auto start = std::chrono::steady_clock::now();
      const SchedulePlan exact = select_devices_oracle(scenario, budgets);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const SchedulePlan approx = select_devices_dp(scenario, budgets);
      print_plan_summary(exact, scenario);
      print_plan_summary(approx, scenario);
      std::cerr << "oracle runtime " << format_sig6(seconds) << " s; dp/oracle objective ratio "
                << format_sig6(exact.objective_bytes == 0 ? 1.0
                                                          : static_cast<double>(approx.objective_bytes) /
                                                                static_cast<double>(exact.objective_bytes))
                << '\n';
      emit(g, g.format == "csv" ? plan_csv(exact) : plan_to_string(exact));
      return kOk;
    }

    if (*simulate) {
      budgets_given = simulate->count("--t-max") > 0 || simulate->count("--e-max") > 0;
      const Scenario scenario = load_scenario(scenario_path);
      SchedulePlan plan;
      Budgets budgets{t_max, e_max};
      if (!plan_path.empty()) {
        plan = load_plan(plan_path);
        if (!budgets_given) budgets = plan.budgets;
      } else {
        plan = select_devices_dp(scenario, budgets);
      }
      FailureSpec failures;
      for (const auto& spec : fail_specs) failures.injected.push_back(parse_failure(spec));
      failures.per_stage_prob = fail_prob;
      failures.rng_seed = g.seed.value_or(0);
      try {
        emit_trace(g, simulate_pipeline(scenario, plan, failures, budgets));
      } catch (const RecoveryInfeasible& e) {
        emit_trace(g, e.partial_trace());
        std::cerr << "error: " << e.what() << '\n';
        return kRecoveryInfeasible;
      }
      return kOk;
    }

    if (*split) {
      const Scenario scenario = load_scenario(scenario_path);
      const Budgets budgets{t_max, e_max};
      std::size_t steps = split_steps.value_or(0);
      if (!split_steps) {
        steps = matched_split_steps(scenario, select_devices_dp(scenario, budgets));
        if (steps == 0) throw ConfigError("dp selects no devices under these budgets; pass --steps");
      }
      SplitConfig config;
      if (dev_a && dev_b) {
        config = {*dev_a, *dev_b, phi, steps};
      } else if (dev_a || dev_b) {
        throw UsageError("--a and --b must be given together");
      } else {
        config = pick_split_pair(scenario, budgets, steps);
        config.split_fraction = phi;
      }
      emit_trace(g, simulate_split(scenario, config, budgets));
      return kOk;
    }

    if (*sweep) {
      if (!scenario_path.empty()) sweep_opts.scenario = load_scenario(scenario_path);
      sweep_opts.generate.area_m = parse_area(area_sweep);
      sweep_opts.base_seed = g.seed.value_or(42);
      emit(g, sweep_csv(run_sweep(sweep_opts)));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
