#include "shotintel/timestamp.hpp"

#include <cstdio>

namespace shotintel {
namespace {

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  pos += count;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_valid_date(int year, int month, int day) {
  if (year < 1 || month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int limit = kDays[month - 1];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) limit = 29;
  return day <= limit;
}

std::string to_iso(const CalendarDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::optional<CalendarDate> parse_iso_date(std::string_view text) {
  std::size_t pos = 0;
  CalendarDate d;
  if (!read_digits(text, pos, 4, d.year) || !expect(text, pos, '-') ||
      !read_digits(text, pos, 2, d.month) || !expect(text, pos, '-') ||
      !read_digits(text, pos, 2, d.day) || pos != text.size())
    return std::nullopt;
  if (!is_valid_date(d.year, d.month, d.day)) return std::nullopt;
  return d;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  std::size_t pos = 0;
  int year, month, day, hour, minute, second = 0;
  if (!read_digits(s, pos, 4, year) || !expect(s, pos, '-') || !read_digits(s, pos, 2, month) ||
      !expect(s, pos, '-') || !read_digits(s, pos, 2, day))
    return std::nullopt;
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, hour) || !expect(s, pos, ':') || !read_digits(s, pos, 2, minute))
    return std::nullopt;
  if (expect(s, pos, ':')) {
    if (!read_digits(s, pos, 2, second)) return std::nullopt;
    if (expect(s, pos, '.')) {
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (!is_valid_date(year, month, day) || hour > 23 || minute > 59 || second > 60)
    return std::nullopt;
  int offset = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    int sign = s[pos] == '-' ? -1 : 1;
    ++pos;
    int oh, om;
    if (!read_digits(s, pos, 2, oh) || !expect(s, pos, ':') || !read_digits(s, pos, 2, om))
      return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    offset = sign * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  Timestamp ts;
  ts.epoch_seconds = days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 +
                     second - static_cast<std::int64_t>(offset) * 60;
  ts.offset_minutes = offset;
  ts.original = std::string(s);
  return ts;
}

std::string format_duration(std::int64_t seconds) {
  if (seconds < 0) seconds = 0;
  std::int64_t minutes = seconds / 60;
  std::int64_t days = minutes / (24 * 60);
  std::int64_t hours = (minutes / 60) % 24;
  std::int64_t mins = minutes % 60;
  char buf[48];
  if (days > 0)
    std::snprintf(buf, sizeof buf, "%lldd%02lldh%02lldm", static_cast<long long>(days),
                  static_cast<long long>(hours), static_cast<long long>(mins));
  else
    std::snprintf(buf, sizeof buf, "%lldh%02lldm", static_cast<long long>(hours),
                  static_cast<long long>(mins));
  return buf;
}

}  // namespace shotintel
