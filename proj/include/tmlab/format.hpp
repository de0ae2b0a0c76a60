#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace tmlab {

/// Shortest round-trip decimal form of a double ("inf"/"nan" for non-finite).
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace tmlab
