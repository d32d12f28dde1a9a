#pragma once

#include <cstdint>

#include "relaydiff/scenario.hpp"

namespace relaydiff {

enum class Direction { up, down };

/// Latency and energy of one device executing one relayed stage:
/// download the latent, run K denoising steps, upload the result.
struct StageCost {
  double t_down_s = 0.0;
  double t_cmp_s = 0.0;
  double t_up_s = 0.0;
  double e_down_j = 0.0;
  double e_cmp_j = 0.0;
  double e_up_j = 0.0;

  double t_total() const { return t_down_s + t_cmp_s + t_up_s; }
  double e_total() const { return e_down_j + e_cmp_j + e_up_j; }

  friend bool operator==(const StageCost&, const StageCost&) = default;
};

/// Bits per second between `device` and the edge server. A per-device
/// override wins; otherwise Shannon capacity with distance-based path loss,
/// distance clamped to at least 1 m.
double link_rate(const Device& device, const Point& server_pos, const LinkParams& link, Direction direction);

double link_rate(const Scenario& scenario, const Device& device, Direction direction);

double transfer_seconds(std::uint64_t bytes, double rate_bps);

StageCost stage_cost(const Device& device, const Point& server_pos, const LinkParams& link,
                     std::uint64_t latent_bytes, int steps);

/// Stage cost with the scenario's link, latent size and steps per stage.
StageCost stage_cost(const Scenario& scenario, const Device& device);

/// One denoising step of the two-segment split baseline. Device A runs the
/// first `split_fraction` of the network, ships features to B through the
/// server, B runs the rest and ships features back.
///
/// `a` and `b` hold each device's share: t_cmp/e_cmp is its segment, t_up/e_up
/// is the upload leg of the feature map it sends, t_down/e_down the download
/// leg of the feature map it receives.
struct SplitStepCost {
  StageCost a;
  StageCost b;

  /// A -> server -> B, upload leg on A plus download leg on B.
  double transfer_ab_s() const { return a.t_up_s + b.t_down_s; }
  double transfer_ba_s() const { return b.t_up_s + a.t_down_s; }
  double t_step_s() const { return a.t_total() + b.t_total(); }
  double t_transfer_s() const { return transfer_ab_s() + transfer_ba_s(); }
  double t_compute_s() const { return a.t_cmp_s + b.t_cmp_s; }
  double e_a_j() const { return a.e_total(); }
  double e_b_j() const { return b.e_total(); }
};

/// Throws ConfigError if both devices are the same or split_fraction is
/// outside [0, 1].
SplitStepCost split_step_cost(const Device& device_a, const Device& device_b, const Point& server_pos,
                              const LinkParams& link, std::uint64_t feature_bytes,
                              double split_fraction);

}  // namespace relaydiff
