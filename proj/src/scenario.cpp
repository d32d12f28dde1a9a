#include "relaydiff/scenario.hpp"

#include <cmath>
#include <set>

#include "relaydiff/errors.hpp"
#include "relaydiff/rng.hpp"

namespace relaydiff {
namespace {

HardwareClass xavier_class() { return {"xavier", 0.12, 20.0, 1.0, 0.5}; }
HardwareClass orin_class() { return {"orin", 0.06, 20.0, 1.0, 0.5}; }

std::string device_field(std::size_t index, const char* name) {
  return "devices[" + std::to_string(index) + "]." + name;
}

void require_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a finite value > 0");
  }
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool is_allowed_bit_width(int bits) {
  for (int allowed : kAllowedBitWidths) {
    if (allowed == bits) return true;
  }
  return false;
}

const Device& Scenario::device(DeviceId id) const {
  if (!has_device(id)) throw ConfigError("unknown device id " + std::to_string(id));
  return devices[id];
}

Device& Scenario::device(DeviceId id) {
  if (!has_device(id)) throw ConfigError("unknown device id " + std::to_string(id));
  return devices[id];
}

std::uint64_t Scenario::total_model_bytes() const {
  std::uint64_t total = 0;
  for (const auto& d : devices) total += d.variant.size_bytes();
  return total;
}

GenerationProfile generation_profile(const std::string& name) {
  GenerationProfile profile;
  profile.name = name;
  if (name == "default") {
    profile.classes = {xavier_class(), orin_class()};
    profile.class_mix = 0.5;
  } else if (name == "xavier") {
    profile.classes = {xavier_class()};
    profile.class_mix = 1.0;
  } else if (name == "orin") {
    profile.classes = {orin_class()};
    profile.class_mix = 1.0;
  } else {
    throw ConfigError("unknown device profile '" + name + "'");
  }
  return profile;
}

std::vector<std::string> profile_names() { return {"default", "xavier", "orin"}; }

double scaled_step_latency(double latency_32bit_s, int bit_width, double exponent) {
  return latency_32bit_s * std::pow(static_cast<double>(bit_width) / 32.0, exponent);
}

Scenario generate_scenario(const GenerateOptions& options) {
  if (options.n_devices < 1) throw ConfigError("n_devices must be >= 1");
  if (!(options.area_m.width > 0.0) || !(options.area_m.height > 0.0)) {
    throw ConfigError("area dimensions must be > 0");
  }
  GenerationProfile profile = generation_profile(options.profile);
  const double mix = options.class_mix.value_or(profile.class_mix);
  if (!(mix >= 0.0 && mix <= 1.0)) throw ConfigError("class_mix must lie in [0,1]");

  Scenario scenario;
  scenario.area_m = options.area_m;
  scenario.server_pos_m = {options.area_m.width / 2.0, options.area_m.height / 2.0};
  scenario.link = profile.link;
  scenario.latent_bytes = profile.latent_bytes;
  scenario.feature_bytes = profile.feature_bytes;
  scenario.steps_per_stage = profile.steps_per_stage;
  scenario.seed = options.seed;

  Rng rng(options.seed);
  scenario.devices.reserve(options.n_devices);
  for (std::size_t i = 0; i < options.n_devices; ++i) {
    Device device;
    device.id = static_cast<DeviceId>(i);
    device.pos_m.x = rng.uniform(0.0, options.area_m.width);
    device.pos_m.y = rng.uniform(0.0, options.area_m.height);
    const int bits = kAllowedBitWidths[rng.index(std::size(kAllowedBitWidths))];
    const bool first_class = rng.uniform01() < mix;
    const HardwareClass& hw =
        (first_class || profile.classes.size() == 1) ? profile.classes[0] : profile.classes[1];
    device.variant = {bits, profile.param_count};
    device.step_latency_s = scaled_step_latency(hw.step_latency_32bit_s, bits, profile.quant_exponent);
    device.compute_power_w = hw.compute_power_w;
    device.tx_power_w = hw.tx_power_w;
    device.rx_power_w = hw.rx_power_w;
    device.profile = hw.name;
    scenario.devices.push_back(std::move(device));
  }
  return scenario;
}

void validate(const Scenario& s) {
  require_positive(s.area_m.width, "area_m[0]");
  require_positive(s.area_m.height, "area_m[1]");
  if (!s.area_m.contains(s.server_pos_m)) {
    throw ValidationError("server_pos_m", "outside the area");
  }
  if (s.latent_bytes == 0) throw ValidationError("latent_bytes", "must be > 0");
  if (s.feature_bytes < s.latent_bytes) {
    throw ValidationError("feature_bytes", "must be >= latent_bytes");
  }
  if (s.steps_per_stage < 1) throw ValidationError("steps_per_stage", "must be >= 1");

  const LinkParams& link = s.link;
  require_positive(link.bandwidth_hz, "link.bandwidth_hz");
  require_positive(link.noise_power_w, "link.noise_power_w");
  require_positive(link.path_loss_ref_gain, "link.path_loss_ref_gain");
  if (!(link.path_loss_exponent >= 2.0)) {
    throw ValidationError("link.path_loss_exponent", "must be >= 2");
  }

  std::set<DeviceId> seen;
  for (std::size_t i = 0; i < s.devices.size(); ++i) {
    if (!seen.insert(s.devices[i].id).second) {
      throw ValidationError(device_field(i, "id"),
                            "duplicate device id " + std::to_string(s.devices[i].id));
    }
  }
  for (std::size_t i = 0; i < s.devices.size(); ++i) {
    const Device& d = s.devices[i];
    if (d.id != i) {
      throw ValidationError(device_field(i, "id"),
                            "device ids must be dense from 0 and sorted; expected " + std::to_string(i));
    }
    if (!s.area_m.contains(d.pos_m)) throw ValidationError(device_field(i, "pos_m"), "outside the area");
    if (!is_allowed_bit_width(d.variant.bit_width)) {
      throw ValidationError(device_field(i, "variant.bit_width"), "must be one of 32, 16, 8, 4");
    }
    if ((d.variant.param_count * static_cast<std::uint64_t>(d.variant.bit_width)) % 8 != 0) {
      throw ValidationError(device_field(i, "variant.param_count"),
                            "param_count * bit_width must be a multiple of 8");
    }
    require_positive(d.step_latency_s, device_field(i, "step_latency_s"));
    require_positive(d.compute_power_w, device_field(i, "compute_power_w"));
    require_positive(d.tx_power_w, device_field(i, "tx_power_w"));
    require_positive(d.rx_power_w, device_field(i, "rx_power_w"));
  }

  for (const auto& [id, rates] : link.rate_override_bps) {
    const std::string field = "link.rate_override_bps[" + std::to_string(id) + "]";
    if (!s.has_device(id)) throw ValidationError(field, "unknown device id");
    require_positive(rates.up_bps, field + ".up_bps");
    require_positive(rates.down_bps, field + ".down_bps");
  }
}

}  // namespace relaydiff
