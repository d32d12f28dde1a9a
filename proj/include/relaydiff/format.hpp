#pragma once

#include <cstdio>
#include <string>

namespace relaydiff {

/// Fixed six-significant-digit rendering used by every CSV writer.
inline std::string format_sig6(double value) {
  if (value == 0.0) value = 0.0;  // folds -0 into 0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace relaydiff
