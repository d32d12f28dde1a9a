#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "relaydiff/format.hpp"
#include "relaydiff/pipeline.hpp"
#include "relaydiff/scheduler.hpp"

namespace relaydiff {
namespace {

using detail::Json;

Json stage_to_json(const PlannedStage& s) {
  Json j;
  j["device_id"] = s.device_id;
  j["t_down_s"] = s.cost.t_down_s;
  j["t_cmp_s"] = s.cost.t_cmp_s;
  j["t_up_s"] = s.cost.t_up_s;
  j["e_down_j"] = s.cost.e_down_j;
  j["e_cmp_j"] = s.cost.e_cmp_j;
  j["e_up_j"] = s.cost.e_up_j;
  return j;
}

PlannedStage stage_from_json(const Json& j, const std::string& path) {
  using namespace detail;
  PlannedStage s;
  s.device_id = static_cast<DeviceId>(uint_at(j, "device_id", path));
  s.cost.t_down_s = number_at(j, "t_down_s", path);
  s.cost.t_cmp_s = number_at(j, "t_cmp_s", path);
  s.cost.t_up_s = number_at(j, "t_up_s", path);
  s.cost.e_down_j = number_at(j, "e_down_j", path);
  s.cost.e_cmp_j = number_at(j, "e_cmp_j", path);
  s.cost.e_up_j = number_at(j, "e_up_j", path);
  for (const char* key : {"t_down_s", "t_cmp_s", "t_up_s", "e_down_j", "e_cmp_j", "e_up_j"}) {
    if (j[key].get<double>() < 0.0) throw ValidationError(join(path, key), "must be >= 0");
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text, const char* what) {
  std::ofstream out(path);
  if (!out) throw ConfigError(std::string("cannot write ") + what + " file " + path.string());
  out << text;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string plan_to_string(const SchedulePlan& plan) {
  Json j;
  j["method"] = to_string(plan.method);
  j["budgets"] = {{"t_max_s", plan.budgets.t_max_s}, {"e_max_j", plan.budgets.e_max_j}};
  if (plan.discretization) {
    const auto& d = *plan.discretization;
    j["discretization"] = {{"dt_s", d.steps.dt_s},
                           {"de_j", d.steps.de_j},
                           {"capacity_t", d.capacity_t},
                           {"capacity_e", d.capacity_e}};
  } else {
    j["discretization"] = nullptr;
  }
  Json stages = Json::array();
  for (const auto& s : plan.stages) stages.push_back(stage_to_json(s));
  j["stages"] = std::move(stages);
  j["objective_bytes"] = plan.objective_bytes;
  j["t_total_s"] = plan.t_total_s;
  j["e_total_j"] = plan.e_total_j;
  return j.dump(2) + "\n";
}

SchedulePlan plan_from_string(const std::string& text) {
  using namespace detail;
  const Json root = parse_document(text);
  SchedulePlan plan;
  try {
    plan.method = method_from_string(as_string(member(root, "method", ""), "method"));
  } catch (const ConfigError& e) {
    throw ValidationError("method", e.what());
  }
  const Json& b = member(root, "budgets", "");
  plan.budgets = {number_at(b, "t_max_s", "budgets"), number_at(b, "e_max_j", "budgets")};
  if (auto it = root.find("discretization"); it != root.end() && !it->is_null()) {
    DiscretizationInfo info;
    info.steps = {number_at(*it, "dt_s", "discretization"), number_at(*it, "de_j", "discretization")};
    info.capacity_t = as_int(member(*it, "capacity_t", "discretization"), "discretization.capacity_t");
    info.capacity_e = as_int(member(*it, "capacity_e", "discretization"), "discretization.capacity_e");
    plan.discretization = info;
  }
  const Json& stages = as_array(member(root, "stages", ""), "stages");
  CostTotals totals;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    PlannedStage s = stage_from_json(stages[i], index_path("stages", i));
    if (!plan.stages.empty() && s.device_id <= plan.stages.back().device_id) {
      throw ValidationError(index_path("stages", i) + ".device_id", "stages must be in ascending device id");
    }
    totals.add(s.cost);
    plan.stages.push_back(s);
  }
  plan.objective_bytes = uint_at(root, "objective_bytes", "");
  plan.t_total_s = number_at(root, "t_total_s", "");
  plan.e_total_j = number_at(root, "e_total_j", "");
  if (plan.t_total_s != totals.t_total_s()) {
    throw ValidationError("t_total_s", "does not match the sum of stage latencies");
  }
  if (plan.e_total_j != totals.e_total_j) {
    throw ValidationError("e_total_j", "does not match the sum of stage energies");
  }
  return plan;
}

void save_plan(const SchedulePlan& plan, const std::filesystem::path& path) {
  write_file(path, plan_to_string(plan), "plan");
}

SchedulePlan load_plan(const std::filesystem::path& path) { return plan_from_string(read_file(path, "plan")); }

std::string trace_to_string(const SimTrace& trace) {
  Json j;
  j["method"] = trace.method;
  j["budgets"] = {{"t_max_s", trace.budgets.t_max_s}, {"e_max_j", trace.budgets.e_max_j}};
  j["steps_per_stage"] = trace.steps_per_stage;
  Json events = Json::array();
  for (const TraceEvent& ev : trace.events) {
    Json e;
    e["t_start_s"] = ev.t_start_s;
    e["t_end_s"] = ev.t_end_s;
    e["kind"] = to_string(ev.kind);
    e["device_id"] = ev.device_id;
    e["amount"] = ev.amount;
    if (ev.peer_id) e["peer_id"] = *ev.peer_id;
    if (ev.phase) e["phase"] = to_string(*ev.phase);
    if (ev.checkpoint) e["checkpoint"] = *ev.checkpoint;
    events.push_back(std::move(e));
  }
  j["events"] = std::move(events);
  j["t_total_s"] = trace.t_total_s;
  j["e_total_j"] = trace.e_total_j;
  j["t_tran_s"] = trace.t_tran_s;
  j["t_cmp_s"] = trace.t_cmp_s;
  j["tran_fraction"] = trace.tran_fraction;
  j["objective_bytes"] = trace.objective_bytes;
  j["stages_planned"] = trace.stages_planned;
  j["stages_completed"] = trace.stages_completed;
  j["replans"] = trace.replans;
  j["transfer_events"] = trace.transfer_events();
  j["complete"] = trace.complete;
  j["feasible"] = trace.feasible;
  return j.dump(2) + "\n";
}

SimTrace trace_from_string(const std::string& text) {
  using namespace detail;
  const Json root = parse_document(text);
  SimTrace t;
  t.method = as_string(member(root, "method", ""), "method");
  const Json& b = member(root, "budgets", "");
  t.budgets = {number_at(b, "t_max_s", "budgets"), number_at(b, "e_max_j", "budgets")};
  t.steps_per_stage = static_cast<int>(as_int(member(root, "steps_per_stage", ""), "steps_per_stage"));
  const Json& events = as_array(member(root, "events", ""), "events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string path = index_path("events", i);
    const Json& e = events[i];
    TraceEvent ev;
    ev.t_start_s = number_at(e, "t_start_s", path);
    ev.t_end_s = number_at(e, "t_end_s", path);
    try {
      ev.kind = event_kind_from_string(as_string(member(e, "kind", path), join(path, "kind")));
      if (auto it = e.find("phase"); it != e.end()) {
        ev.phase = phase_from_string(as_string(*it, join(path, "phase")));
      }
    } catch (const ConfigError& err) {
      throw ValidationError(path, err.what());
    }
    ev.device_id = static_cast<DeviceId>(uint_at(e, "device_id", path));
    ev.amount = uint_at(e, "amount", path);
    if (auto it = e.find("peer_id"); it != e.end()) {
      ev.peer_id = static_cast<DeviceId>(as_uint(*it, join(path, "peer_id")));
    }
    if (auto it = e.find("checkpoint"); it != e.end()) ev.checkpoint = as_uint(*it, join(path, "checkpoint"));
    t.events.push_back(ev);
  }
  t.t_total_s = number_at(root, "t_total_s", "");
  t.e_total_j = number_at(root, "e_total_j", "");
  t.t_tran_s = number_at(root, "t_tran_s", "");
  t.t_cmp_s = number_at(root, "t_cmp_s", "");
  t.tran_fraction = number_at(root, "tran_fraction", "");
  t.objective_bytes = uint_at(root, "objective_bytes", "");
  t.stages_planned = uint_at(root, "stages_planned", "");
  t.stages_completed = uint_at(root, "stages_completed", "");
  t.replans = uint_at(root, "replans", "");
  t.complete = as_bool(member(root, "complete", ""), "complete");
  t.feasible = as_bool(member(root, "feasible", ""), "feasible");
  return t;
}

void save_trace(const SimTrace& trace, const std::filesystem::path& path) {
  write_file(path, trace_to_string(trace), "trace");
}

std::string trace_summary_header() {
  return "method,stages_planned,stages_completed,objective_bytes,t_total_s,e_total_j,t_tran_s,t_cmp_s,"
         "tran_fraction,transfer_events,replans,complete,feasible";
}

std::string trace_summary_row(const SimTrace& t) {
  std::ostringstream out;
  out << t.method << ',' << t.stages_planned << ',' << t.stages_completed << ',' << t.objective_bytes << ','
      << format_sig6(t.t_total_s) << ',' << format_sig6(t.e_total_j) << ',' << format_sig6(t.t_tran_s) << ','
      << format_sig6(t.t_cmp_s) << ',' << format_sig6(t.tran_fraction) << ',' << t.transfer_events() << ','
      << t.replans << ',' << (t.complete ? "true" : "false") << ',' << (t.feasible ? "true" : "false");
  return out.str();
}

}  // namespace relaydiff
