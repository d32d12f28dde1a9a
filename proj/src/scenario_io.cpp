#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "relaydiff/scenario.hpp"

namespace relaydiff {
namespace {

using detail::Json;

Json device_to_json(const Device& d) {
  Json j;
  j["id"] = d.id;
  j["pos_m"] = detail::to_json(d.pos_m);
  j["variant"] = {{"bit_width", d.variant.bit_width},
                  {"param_count", d.variant.param_count},
                  {"size_bytes", d.variant.size_bytes()}};
  j["step_latency_s"] = d.step_latency_s;
  j["compute_power_w"] = d.compute_power_w;
  j["tx_power_w"] = d.tx_power_w;
  j["rx_power_w"] = d.rx_power_w;
  j["available"] = d.available;
  j["profile"] = d.profile;
  return j;
}

Device device_from_json(const Json& j, const std::string& path) {
  using namespace detail;
  Device d;
  const std::uint64_t id = uint_at(j, "id", path);
  if (id > 0xffffffffULL) throw ValidationError(join(path, "id"), "device id out of range");
  d.id = static_cast<DeviceId>(id);
  d.pos_m = as_point(member(j, "pos_m", path), join(path, "pos_m"));

  const std::string vpath = join(path, "variant");
  const Json& v = member(j, "variant", path);
  const std::int64_t bits = as_int(member(v, "bit_width", vpath), join(vpath, "bit_width"));
  if (!is_allowed_bit_width(static_cast<int>(bits))) {
    throw ValidationError(join(vpath, "bit_width"), "must be one of 32, 16, 8, 4");
  }
  d.variant.bit_width = static_cast<int>(bits);
  d.variant.param_count = uint_at(v, "param_count", vpath);
  if (auto it = v.find("size_bytes"); it != v.end()) {
    if (as_uint(*it, join(vpath, "size_bytes")) != d.variant.size_bytes()) {
      throw ValidationError(join(vpath, "size_bytes"), "does not equal param_count * bit_width / 8");
    }
  }

  d.step_latency_s = number_at(j, "step_latency_s", path);
  d.compute_power_w = number_at(j, "compute_power_w", path);
  d.tx_power_w = number_at(j, "tx_power_w", path);
  d.rx_power_w = number_at(j, "rx_power_w", path);
  if (auto it = j.find("available"); it != j.end()) d.available = as_bool(*it, join(path, "available"));
  if (auto it = j.find("profile"); it != j.end()) d.profile = as_string(*it, join(path, "profile"));
  return d;
}

Json link_to_json(const LinkParams& link) {
  Json j;
  j["bandwidth_hz"] = link.bandwidth_hz;
  j["noise_power_w"] = link.noise_power_w;
  j["path_loss_ref_gain"] = link.path_loss_ref_gain;
  j["path_loss_exponent"] = link.path_loss_exponent;
  Json overrides = Json::array();
  for (const auto& [id, r] : link.rate_override_bps) {
    overrides.push_back({{"device_id", id}, {"up_bps", r.up_bps}, {"down_bps", r.down_bps}});
  }
  j["rate_override_bps"] = std::move(overrides);
  return j;
}

LinkParams link_from_json(const Json& j, const std::string& path) {
  using namespace detail;
  LinkParams link;
  link.bandwidth_hz = number_at(j, "bandwidth_hz", path);
  link.noise_power_w = number_at(j, "noise_power_w", path);
  link.path_loss_ref_gain = number_at(j, "path_loss_ref_gain", path);
  link.path_loss_exponent = number_at(j, "path_loss_exponent", path);
  if (auto it = j.find("rate_override_bps"); it != j.end() && !it->is_null()) {
    const std::string opath = join(path, "rate_override_bps");
    const Json& arr = as_array(*it, opath);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string epath = index_path(opath, i);
      const auto id = static_cast<DeviceId>(uint_at(arr[i], "device_id", epath));
      RateOverride r{number_at(arr[i], "up_bps", epath), number_at(arr[i], "down_bps", epath)};
      if (!link.rate_override_bps.emplace(id, r).second) {
        throw ValidationError(join(epath, "device_id"), "duplicate rate override");
      }
    }
  }
  return link;
}

}  // namespace

std::string scenario_to_string(const Scenario& s) {
  Json j;
  j["area_m"] = Json::array({s.area_m.width, s.area_m.height});
  j["server_pos_m"] = detail::to_json(s.server_pos_m);
  Json devices = Json::array();
  for (const auto& d : s.devices) devices.push_back(device_to_json(d));
  j["devices"] = std::move(devices);
  j["link"] = link_to_json(s.link);
  j["latent_bytes"] = s.latent_bytes;
  j["feature_bytes"] = s.feature_bytes;
  j["steps_per_stage"] = s.steps_per_stage;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

Scenario scenario_from_string(const std::string& text) {
  using namespace detail;
  const Json root = parse_document(text);
  Scenario s;
  const Point area = as_point(member(root, "area_m", ""), "area_m");
  s.area_m = {area.x, area.y};
  s.server_pos_m = as_point(member(root, "server_pos_m", ""), "server_pos_m");

  const Json& devices = as_array(member(root, "devices", ""), "devices");
  std::set<DeviceId> seen;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    Device d = device_from_json(devices[i], index_path("devices", i));
    if (!seen.insert(d.id).second) {
      throw ValidationError(index_path("devices", i) + ".id", "duplicate device id " + std::to_string(d.id));
    }
    s.devices.push_back(std::move(d));
  }
  std::sort(s.devices.begin(), s.devices.end(),
            [](const Device& a, const Device& b) { return a.id < b.id; });

  s.link = link_from_json(member(root, "link", ""), "link");
  s.latent_bytes = uint_at(root, "latent_bytes", "");
  s.feature_bytes = uint_at(root, "feature_bytes", "");
  const std::int64_t k = as_int(member(root, "steps_per_stage", ""), "steps_per_stage");
  if (k < 1 || k > 1'000'000) throw ValidationError("steps_per_stage", "must be in [1, 1e6]");
  s.steps_per_stage = static_cast<int>(k);
  s.seed = uint_at(root, "seed", "");

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path.string());
  out << scenario_to_string(scenario);
}

}  // namespace relaydiff
