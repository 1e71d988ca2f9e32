#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace uqkit::detail {

/// Shortest rendering that parses back to the same double. Integers below
/// 1e15 are written without an exponent.
inline std::string format_double(double x) {
  char buffer[32];
  if (x == std::trunc(x) && std::fabs(x) < 1e15) {
    std::snprintf(buffer, sizeof buffer, "%.0f", x);
    return buffer;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, x);
    if (std::strtod(buffer, nullptr) == x) break;
  }
  return buffer;
}

}  // namespace uqkit::detail
