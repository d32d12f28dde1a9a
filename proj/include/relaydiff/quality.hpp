#pragma once

#include <cstdint>

#include "relaydiff/scenario.hpp"
#include "relaydiff/scheduler.hpp"

namespace relaydiff {

/// Stand-in for perceptual image quality: total model bytes taking part in
/// generation, raw and as a share of every device's model bytes. Only the
/// ordering it induces is meaningful; it is not calibrated to MS-SSIM.
struct QualityScore {
  std::uint64_t objective_bytes = 0;
  double normalized = 0.0;

  friend bool operator==(const QualityScore&, const QualityScore&) = default;
};

/// Sizes are read from the scenario; throws ConfigError if the plan names a
/// device the scenario does not have.
QualityScore quality(const SchedulePlan& plan, const Scenario& scenario);

QualityScore quality_of_bytes(std::uint64_t objective_bytes, const Scenario& scenario);

}  // namespace relaydiff
