#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace shotintel {

// round(100 * num / den, decimals) with half-up rounding done in integers, so
// table percentages are reproducible bit-for-bit. den == 0 yields 0.
inline std::int64_t percent_scaled(std::uint64_t num, std::uint64_t den, int decimals) {
  if (den == 0) return 0;
  std::uint64_t scale = 100;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  unsigned __int128 n = static_cast<unsigned __int128>(num) * scale * 2 + den;
  return static_cast<std::int64_t>(n / (static_cast<unsigned __int128>(den) * 2));
}

inline double percent(std::uint64_t num, std::uint64_t den, int decimals = 2) {
  double div = 1.0;
  for (int i = 0; i < decimals; ++i) div *= 10.0;
  return static_cast<double>(percent_scaled(num, den, decimals)) / div;
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace shotintel
