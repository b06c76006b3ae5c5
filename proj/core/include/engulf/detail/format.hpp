#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace engulf::detail {

// Locale-independent shortest round-trip formatting; infinities become the
// strings "+inf"/"-inf" (JSON has no literal for them).
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Fixed-precision variant for SVG coordinates.
inline std::string format_fixed(double v, int precision) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace engulf::detail
