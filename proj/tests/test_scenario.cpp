#include <array>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "json.hpp"
#include "relaydiff/errors.hpp"
#include "relaydiff/scenario.hpp"
#include "support/fixtures.hpp"

using namespace relaydiff;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("relaydiff_" + name); }

std::string with_devices_edit(const Scenario& s, void (*edit)(nlohmann::ordered_json&)) {
  auto j = nlohmann::ordered_json::parse(scenario_to_string(s));
  edit(j);
  return j.dump(2);
}

}  // namespace

TEST_CASE("generate_scenario places 20 devices inside the 500 m square") {
  const Scenario s = generate_scenario({20, {500.0, 500.0}, 42, "default", std::nullopt});
  REQUIRE(s.devices.size() == 20);
  for (const Device& d : s.devices) {
    CHECK(s.area_m.contains(d.pos_m));
    CHECK(is_allowed_bit_width(d.variant.bit_width));
  }
  CHECK(s.server_pos_m == Point{250.0, 250.0});
  CHECK(s.latent_bytes == 262144);
  CHECK(s.feature_bytes == 2 * s.latent_bytes);
  CHECK(s.steps_per_stage == 5);
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("minimal instance: one device in a 1 m square") {
  const Scenario s = generate_scenario({1, {1.0, 1.0}, 0, "default", std::nullopt});
  REQUIRE(s.devices.size() == 1);
  CHECK(s.area_m.contains(s.devices[0].pos_m));
}

TEST_CASE("generation is deterministic for a fixed seed") {
  const GenerateOptions opts{20, {500.0, 500.0}, 7, "default", std::nullopt};
  CHECK(scenario_to_string(generate_scenario(opts)) == scenario_to_string(generate_scenario(opts)));
  GenerateOptions other = opts;
  other.seed = 8;
  CHECK(scenario_to_string(generate_scenario(opts)) != scenario_to_string(generate_scenario(other)));
}

TEST_CASE("generation rejects bad arguments") {
  CHECK_THROWS_AS(generate_scenario({20, {500.0, 500.0}, 1, "no-such-profile", std::nullopt}), ConfigError);
  CHECK_THROWS_AS(generate_scenario({0, {500.0, 500.0}, 1, "default", std::nullopt}), ConfigError);
  CHECK_THROWS_AS(generate_scenario({3, {0.0, 500.0}, 1, "default", std::nullopt}), ConfigError);
  CHECK_THROWS_AS(generate_scenario({3, {500.0, 500.0}, 1, "default", 1.5}), ConfigError);
}

TEST_CASE("variant sizes and quantization-scaled step latency") {
  CHECK(ModelVariant{32, 1'000'000'000}.size_bytes() == 4'000'000'000ULL);
  CHECK(ModelVariant{16, 1'000'000'000}.size_bytes() == 2'000'000'000ULL);
  CHECK(ModelVariant{8, 1'000'000'000}.size_bytes() == 1'000'000'000ULL);
  CHECK(ModelVariant{4, 1'000'000'000}.size_bytes() == 500'000'000ULL);

  CHECK(scaled_step_latency(0.12, 32, 0.7) == doctest::Approx(0.12));
  CHECK(scaled_step_latency(0.12, 16, 0.7) == doctest::Approx(0.12 * std::pow(0.5, 0.7)));

  const Scenario s = generate_scenario({200, {500.0, 500.0}, 3, "default", std::nullopt});
  for (const Device& d : s.devices) {
    const double base = d.profile == "xavier" ? 0.12 : 0.06;
    CHECK(d.step_latency_s == doctest::Approx(base * std::pow(d.variant.bit_width / 32.0, 0.7)));
    CHECK(d.compute_power_w == 20.0);
    CHECK(d.tx_power_w == 1.0);
    CHECK(d.rx_power_w == 0.5);
  }
}

TEST_CASE("class mix controls the hardware split") {
  const auto count_xavier = [](const Scenario& s) {
    return std::count_if(s.devices.begin(), s.devices.end(), [](const Device& d) { return d.profile == "xavier"; });
  };
  CHECK(count_xavier(generate_scenario({50, {500.0, 500.0}, 1, "default", 1.0})) == 50);
  CHECK(count_xavier(generate_scenario({50, {500.0, 500.0}, 1, "default", 0.0})) == 0);
  CHECK(count_xavier(generate_scenario({50, {500.0, 500.0}, 1, "orin", std::nullopt})) == 0);
}

TEST_CASE("bit widths are uniform over {32,16,8,4} (chi-square, 4000 draws)") {
  std::map<int, int> counts;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Scenario s = generate_scenario({20, {500.0, 500.0}, seed, "default", std::nullopt});
    for (const Device& d : s.devices) {
      ++counts[d.variant.bit_width];
      ++total;
      CHECK(s.area_m.contains(d.pos_m));
      CHECK(d.step_latency_s > 0.0);
    }
  }
  REQUIRE(total == 4000);
  REQUIRE(counts.size() == 4);
  const double expected = total / 4.0;
  double chi2 = 0.0;
  for (const auto& [bits, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 3 degrees of freedom; p = 0.001 critical value.
  CHECK(chi2 < 16.27);
}

TEST_CASE("save then load returns an equal scenario") {
  Scenario s = generate_scenario({20, {500.0, 500.0}, 42, "default", std::nullopt});
  s.link.rate_override_bps[3] = {8e6, 4e6};
  s.devices[5].available = false;
  const fs::path path = temp_file("roundtrip.json");
  save_scenario(s, path);
  CHECK(load_scenario(path) == s);
  fs::remove(path);
}

TEST_CASE("round trip is lossless for random scenarios with overrides") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Scenario s = testing::random_scenario(rng, 1 + rng.index(15));
    CHECK(scenario_from_string(scenario_to_string(s)) == s);
  }
}

TEST_CASE("latent_bytes from the file is preserved") {
  Scenario s = testing::blank_scenario(2);
  s.latent_bytes = 262144;
  CHECK(scenario_from_string(scenario_to_string(s)).latent_bytes == 262144);
}

TEST_CASE("duplicate device ids are rejected naming the field") {
  const Scenario s = testing::blank_scenario(5);
  const std::string text = with_devices_edit(s, [](nlohmann::ordered_json& j) { j["devices"][4]["id"] = 3; });
  try {
    scenario_from_string(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "devices[4].id");
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("schema violations name the offending field") {
  const Scenario s = testing::blank_scenario(3);
  auto field_of = [&](void (*edit)(nlohmann::ordered_json&)) {
    try {
      scenario_from_string(with_devices_edit(s, edit));
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };
  CHECK(field_of([](auto& j) { j.erase("latent_bytes"); }) == "latent_bytes");
  CHECK(field_of([](auto& j) { j["devices"][1]["variant"]["bit_width"] = 12; }) == "devices[1].variant.bit_width");
  CHECK(field_of([](auto& j) { j["devices"][2]["step_latency_s"] = -1.0; }) == "devices[2].step_latency_s");
  CHECK(field_of([](auto& j) { j["devices"][0]["pos_m"] = {500.0, 1.0}; }) == "devices[0].pos_m");
  CHECK(field_of([](auto& j) { j["devices"][0]["variant"]["size_bytes"] = 1; }) == "devices[0].variant.size_bytes");
  CHECK(field_of([](auto& j) { j["feature_bytes"] = 1; }) == "feature_bytes");
  CHECK(field_of([](auto& j) { j["steps_per_stage"] = 0; }) == "steps_per_stage");
  CHECK(field_of([](auto& j) { j["link"]["bandwidth_hz"] = "wide"; }) == "link.bandwidth_hz");
  CHECK(field_of([](auto& j) { j["link"]["path_loss_exponent"] = 1.5; }) == "link.path_loss_exponent");
  CHECK(field_of([](auto& j) { j["devices"][2]["id"] = 7; }) == "devices[2].id");
  CHECK(field_of([](auto& j) {
          j["link"]["rate_override_bps"] = {{{"device_id", 1}, {"up_bps", 0.0}, {"down_bps", 1.0}}};
        }) == "link.rate_override_bps[1].up_bps");
  CHECK_THROWS_AS(scenario_from_string("{ not json"), ValidationError);
}

TEST_CASE("device order in the file does not matter") {
  const Scenario s = testing::blank_scenario(4);
  const std::string text = with_devices_edit(s, [](nlohmann::ordered_json& j) {
    std::swap(j["devices"][0], j["devices"][3]);
  });
  CHECK(scenario_from_string(text) == s);
}
