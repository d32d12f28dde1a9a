#include "relaydiff/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "relaydiff/errors.hpp"

namespace relaydiff {

double link_rate(const Device& device, const Point& server_pos, const LinkParams& link,
                 Direction direction) {
  if (auto it = link.rate_override_bps.find(device.id); it != link.rate_override_bps.end()) {
    return direction == Direction::up ? it->second.up_bps : it->second.down_bps;
  }
  const double d = std::max(distance(device.pos_m, server_pos), 1.0);
  const double gain = link.path_loss_ref_gain * std::pow(d, -link.path_loss_exponent);
  const double snr = device.tx_power_w * gain / link.noise_power_w;
  return link.bandwidth_hz * std::log2(1.0 + snr);
}

double link_rate(const Scenario& scenario, const Device& device, Direction direction) {
  return link_rate(device, scenario.server_pos_m, scenario.link, direction);
}

double transfer_seconds(std::uint64_t bytes, double rate_bps) {
  if (bytes == 0) return 0.0;
  return 8.0 * static_cast<double>(bytes) / rate_bps;
}

StageCost stage_cost(const Device& device, const Point& server_pos, const LinkParams& link,
                     std::uint64_t latent_bytes, int steps) {
  StageCost c;
  c.t_down_s = transfer_seconds(latent_bytes, link_rate(device, server_pos, link, Direction::down));
  c.t_up_s = transfer_seconds(latent_bytes, link_rate(device, server_pos, link, Direction::up));
  c.t_cmp_s = static_cast<double>(std::max(steps, 0)) * device.step_latency_s;
  c.e_down_j = device.rx_power_w * c.t_down_s;
  c.e_cmp_j = device.compute_power_w * c.t_cmp_s;
  c.e_up_j = device.tx_power_w * c.t_up_s;
  return c;
}

StageCost stage_cost(const Scenario& scenario, const Device& device) {
  return stage_cost(device, scenario.server_pos_m, scenario.link, scenario.latent_bytes,
                    scenario.steps_per_stage);
}

SplitStepCost split_step_cost(const Device& device_a, const Device& device_b, const Point& server_pos,
                              const LinkParams& link, std::uint64_t feature_bytes,
                              double split_fraction) {
  if (device_a.id == device_b.id) {
    throw ConfigError("split inference needs two distinct devices (got " + std::to_string(device_a.id) +
                      " twice)");
  }
  if (!(split_fraction >= 0.0 && split_fraction <= 1.0)) {
    throw ConfigError("split_fraction must lie in [0, 1]");
  }

  auto share = [&](const Device& self, double fraction) {
    StageCost c;
    c.t_cmp_s = fraction * self.step_latency_s;
    c.t_up_s = transfer_seconds(feature_bytes, link_rate(self, server_pos, link, Direction::up));
    c.t_down_s = transfer_seconds(feature_bytes, link_rate(self, server_pos, link, Direction::down));
    c.e_cmp_j = self.compute_power_w * c.t_cmp_s;
    c.e_up_j = self.tx_power_w * c.t_up_s;
    c.e_down_j = self.rx_power_w * c.t_down_s;
    return c;
  };
  return {share(device_a, split_fraction), share(device_b, 1.0 - split_fraction)};
}

}  // namespace relaydiff
