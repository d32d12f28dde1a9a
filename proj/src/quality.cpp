#include "relaydiff/quality.hpp"

namespace relaydiff {

QualityScore quality_of_bytes(std::uint64_t objective_bytes, const Scenario& scenario) {
  const std::uint64_t total = scenario.total_model_bytes();
  QualityScore score;
  score.objective_bytes = objective_bytes;
  if (total > 0) {
    score.normalized = objective_bytes == total
                           ? 1.0
                           : static_cast<double>(objective_bytes) / static_cast<double>(total);
  }
  return score;
}

QualityScore quality(const SchedulePlan& plan, const Scenario& scenario) {
  std::uint64_t bytes = 0;
  for (const PlannedStage& s : plan.stages) bytes += scenario.device(s.device_id).variant.size_bytes();
  return quality_of_bytes(bytes, scenario);
}

}  // namespace relaydiff
