#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace ges {

/// Decimal text for a double, %.17g style by default so values round-trip.
inline std::string format_double(double v, int precision = 17) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

}  // namespace ges
