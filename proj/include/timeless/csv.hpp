#pragma once

#include <cstdio>
#include <string>

namespace timeless::csv {

/// 17 significant digits, enough to round-trip any double.
inline std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace timeless::csv
