#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace riskalloc {

// Probabilities and other reals go to files with 12 significant digits.
inline constexpr int kSignificantDigits = 12;

inline std::string format_real(double v, int digits = kSignificantDigits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// v rounded to `digits` significant digits, as the nearest double.
inline double round_significant(double v, int digits = kSignificantDigits) {
  return std::strtod(format_real(v, digits).c_str(), nullptr);
}

}  // namespace riskalloc
