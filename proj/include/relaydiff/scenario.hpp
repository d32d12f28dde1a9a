#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relaydiff {

using DeviceId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

inline constexpr int kAllowedBitWidths[] = {32, 16, 8, 4};

bool is_allowed_bit_width(int bits);

/// A quantized copy of the base diffusion model.
struct ModelVariant {
  int bit_width = 32;
  std::uint64_t param_count = 0;

  std::uint64_t size_bytes() const { return param_count * static_cast<std::uint64_t>(bit_width) / 8; }

  friend bool operator==(const ModelVariant&, const ModelVariant&) = default;
};

struct Device {
  DeviceId id = 0;
  Point pos_m;
  ModelVariant variant;
  double step_latency_s = 0.0;  // per denoising step, at this variant's bit width
  double compute_power_w = 0.0;
  double tx_power_w = 0.0;
  double rx_power_w = 0.0;
  bool available = true;
  std::string profile;  // hardware class label, informational

  friend bool operator==(const Device&, const Device&) = default;
};

struct RateOverride {
  double up_bps = 0.0;
  double down_bps = 0.0;

  friend bool operator==(const RateOverride&, const RateOverride&) = default;
};

struct LinkParams {
  double bandwidth_hz = 10.0e6;
  double noise_power_w = 1.0e-13;
  double path_loss_ref_gain = 1.0e-3;
  double path_loss_exponent = 3.0;
  std::map<DeviceId, RateOverride> rate_override_bps;

  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

struct Area {
  double width = 0.0;
  double height = 0.0;

  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height;
  }

  friend bool operator==(const Area&, const Area&) = default;
};

struct Scenario {
  Area area_m;
  Point server_pos_m;
  std::vector<Device> devices;  // sorted by id, ids dense from 0
  LinkParams link;
  std::uint64_t latent_bytes = 262144;
  std::uint64_t feature_bytes = 524288;
  int steps_per_stage = 5;
  std::uint64_t seed = 0;

  const Device& device(DeviceId id) const;
  Device& device(DeviceId id);
  bool has_device(DeviceId id) const { return id < devices.size(); }

  /// Sum of variant sizes over every device, available or not.
  std::uint64_t total_model_bytes() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// One hardware class in a generation profile. Step latency is given at
/// 32-bit and scaled by (bit_width / 32)^quant_exponent.
struct HardwareClass {
  std::string name;
  double step_latency_32bit_s = 0.0;
  double compute_power_w = 20.0;
  double tx_power_w = 1.0;
  double rx_power_w = 0.5;
};

struct GenerationProfile {
  std::string name;
  std::vector<HardwareClass> classes;  // classes[0] drawn with probability class_mix
  double class_mix = 0.5;
  double quant_exponent = 0.7;
  std::uint64_t param_count = 1'000'000'000;
  LinkParams link;
  std::uint64_t latent_bytes = 262144;
  std::uint64_t feature_bytes = 524288;
  int steps_per_stage = 5;
};

/// Looks up a named profile ("default", "xavier", "orin").
/// Throws ConfigError for unknown names.
GenerationProfile generation_profile(const std::string& name);

std::vector<std::string> profile_names();

double scaled_step_latency(double latency_32bit_s, int bit_width, double exponent);

struct GenerateOptions {
  std::size_t n_devices = 20;
  Area area_m{500.0, 500.0};
  std::uint64_t seed = 42;
  std::string profile = "default";
  std::optional<double> class_mix;  // overrides the profile's mix when set
};

/// Devices placed uniformly i.i.d. in the area, bit widths uniform over
/// {32,16,8,4}, hardware class Bernoulli(class_mix). Server at area center.
Scenario generate_scenario(const GenerateOptions& options);

/// Checks every scenario invariant; throws ValidationError naming the field.
void validate(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

std::string scenario_to_string(const Scenario& scenario);
Scenario scenario_from_string(const std::string& text);

}  // namespace relaydiff
