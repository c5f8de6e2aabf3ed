#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace shotintel {

/// An instant that remembers the text and UTC offset it was given with.
/// Ordering and equality use the instant only.
struct Timestamp {
  std::int64_t epoch_seconds = 0;
  int offset_minutes = 0;
  std::string original;

  friend bool operator==(const Timestamp& a, const Timestamp& b) {
    return a.epoch_seconds == b.epoch_seconds;
  }
  friend std::strong_ordering operator<=>(const Timestamp& a, const Timestamp& b) {
    return a.epoch_seconds <=> b.epoch_seconds;
  }
};

/// Accepts RFC 3339 date-times; seconds and fractional seconds are optional
/// ("2023-02-11T22:55+01:00" is valid). A zone designator is mandatory.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// "18h09m", or "2d03h00m" beyond a day. Negative spans are clamped to zero.
std::string format_duration(std::int64_t seconds);

struct CalendarDate {
  int year = 0;
  int month = 0;
  int day = 0;
  friend bool operator==(const CalendarDate&, const CalendarDate&) = default;
};

bool is_valid_date(int year, int month, int day);
std::string to_iso(const CalendarDate& d);
std::optional<CalendarDate> parse_iso_date(std::string_view text);

// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

}  // namespace shotintel
