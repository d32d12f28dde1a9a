#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "relaydiff_cli_test";

int run(const std::string& args, const std::string& stdout_file = "") {
  fs::create_directories(kWork);
  std::string cmd = "cd '" + kWork.string() + "' && '" RELAYDIFF_CLI_PATH "' " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > '" + stdout_file + "'";
  cmd += " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json(const std::string& name) { return nlohmann::json::parse(slurp(kWork / name)); }

void ensure_scenario() {
  REQUIRE(run("gen-scenario --devices 20 --area 500 --seed 42 -o s.json") == 0);
}

}  // namespace

TEST_CASE("gen-scenario writes a 20-device file deterministically") {
  ensure_scenario();
  CHECK(read_json("s.json")["devices"].size() == 20);
  const std::string first = slurp(kWork / "s.json");
  REQUIRE(run("gen-scenario --devices 20 --area 500 --seed 42 -o s2.json") == 0);
  CHECK(slurp(kWork / "s2.json") == first);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("gen-scenario --devices 0 -o bad.json") == 2);
  CHECK(run("schedule") == 2);
  CHECK(run("no-such-command") == 2);
  ensure_scenario();
  CHECK(run("simulate -s s.json --fail seven:compute") == 2);
}

TEST_CASE("schedule honours the default budgets") {
  ensure_scenario();
  REQUIRE(run("schedule -s s.json --t-max 2.0 --e-max 200 --method dp -o p.json") == 0);
  const auto plan = read_json("p.json");
  CHECK(plan["method"] == "dp");
  CHECK(plan["t_total_s"].get<double>() <= 2.0);
  CHECK(plan["e_total_j"].get<double>() <= 200.0);
  CHECK(plan["stages"].size() > 0);
}

TEST_CASE("zero latency budget gives an empty plan and success") {
  ensure_scenario();
  REQUIRE(run("schedule -s s.json --t-max 0 -o empty.json") == 0);
  CHECK(read_json("empty.json")["stages"].empty());
}

TEST_CASE("oracle runs on the 20-device scenario") {
  ensure_scenario();
  REQUIRE(run("oracle -s s.json -o o.json") == 0);
  REQUIRE(run("schedule -s s.json -o p.json") == 0);
  CHECK(read_json("o.json")["objective_bytes"].get<std::uint64_t>() >=
        read_json("p.json")["objective_bytes"].get<std::uint64_t>());
}

TEST_CASE("simulate writes a trace within the latency budget") {
  ensure_scenario();
  REQUIRE(run("schedule -s s.json -o p.json") == 0);
  REQUIRE(run("simulate -s s.json -p p.json -o t.json", (kWork / "summary.csv").string()) == 0);
  const auto trace = read_json("t.json");
  CHECK(trace["t_total_s"].get<double>() <= 2.0);
  CHECK(trace["complete"] == true);
  const std::string summary = slurp(kWork / "summary.csv");
  CHECK(summary.rfind("method,", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 2);
}

TEST_CASE("injected failure shows up as failure and replan events") {
  ensure_scenario();
  REQUIRE(run("schedule -s s.json -o p.json") == 0);
  const auto plan = read_json("p.json");
  const auto victim = plan["stages"][1]["device_id"].get<int>();
  const int code = run("simulate -s s.json -p p.json --t-max 3 --fail " + std::to_string(victim) + ":compute -o f.json");
  REQUIRE(code == 0);
  int failures = 0;
  int replans = 0;
  const auto trace = read_json("f.json");
  for (const auto& ev : trace["events"]) {
    failures += ev["kind"] == "failure";
    replans += ev["kind"] == "replan";
  }
  CHECK(failures == 1);
  CHECK(replans == 1);
  CHECK(run("simulate -s s.json -p p.json --fail 99:compute") == 4);  // not in plan
}

TEST_CASE("unrecoverable failure exits with its own code and keeps the partial trace") {
  REQUIRE(run("gen-scenario --devices 1 --area 10 --seed 3 -o one.json") == 0);
  REQUIRE(run("schedule -s one.json --t-max 5 -o one_plan.json") == 0);
  REQUIRE(read_json("one_plan.json")["stages"].size() == 1);
  CHECK(run("simulate -s one.json -p one_plan.json --fail 0:upload -o partial.json") == 5);
  CHECK(read_json("partial.json")["complete"] == false);
}

TEST_CASE("split with 10 steps has 20 transfer events") {
  ensure_scenario();
  REQUIRE(run("split -s s.json --steps 10 -o sp.json") == 0);
  int transfers = 0;
  const auto trace = read_json("sp.json");
  for (const auto& ev : trace["events"]) transfers += ev["kind"] == "transfer";
  CHECK(transfers == 20);
  CHECK(read_json("sp.json")["transfer_events"] == 20);
}

TEST_CASE("invalid scenario files exit with the validation code") {
  ensure_scenario();
  auto doc = read_json("s.json");
  doc["devices"][4]["id"] = 3;
  std::ofstream(kWork / "dup.json") << doc.dump(2);
  CHECK(run("schedule -s dup.json") == 3);
}

TEST_CASE("sweep emits sorted, reproducible CSV") {
  REQUIRE(run("sweep --seed 42 --t-max-grid 1.0,2.0 --e-max-grid 200 --methods dp,no_ds,split -o a.csv") == 0);
  REQUIRE(run("sweep --seed 42 --t-max-grid 1.0,2.0 --e-max-grid 200 --methods dp,no_ds,split --jobs 1 -o b.csv") == 0);
  const std::string a = slurp(kWork / "a.csv");
  CHECK(a == slurp(kWork / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 7);
  CHECK(run("sweep --t-max-grid 2.0,1.0") == 4);
}
