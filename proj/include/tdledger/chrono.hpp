#pragma once

// UTC calendar helpers. All instants are second-resolution sys_seconds;
// calendar dates are year_month_day; month bucketing uses UTC months.

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tdledger/error.hpp"

namespace tdledger {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

struct YearMonth {
  int year = 1970;
  unsigned month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  static YearMonth of(Timestamp ts) {
    const Date d{std::chrono::floor<std::chrono::days>(ts)};
    return {static_cast<int>(d.year()), static_cast<unsigned>(d.month())};
  }

  YearMonth next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
  }

  Timestamp begin() const {
    return Timestamp{std::chrono::sys_days{std::chrono::year{year} /
                                           std::chrono::month{month} /
                                           std::chrono::day{1}}};
  }

  // Last representable instant of the month.
  Timestamp end() const { return next().begin() - std::chrono::seconds{1}; }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
  }
};

namespace detail {

inline bool read_int(std::string_view s, std::size_t& pos, std::size_t min_digits,
                     std::size_t max_digits, int& out) {
  std::size_t n = 0;
  while (pos + n < s.size() && n < max_digits && s[pos + n] >= '0' &&
         s[pos + n] <= '9') {
    ++n;
  }
  if (n < min_digits) return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, out);
  if (ec != std::errc{}) return false;
  pos += n;
  return true;
}

inline std::optional<Timestamp> compose(int y, int mo, int d, int h, int mi, int sec,
                                        int offset_minutes = 0) {
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) return std::nullopt;
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return Timestamp{std::chrono::sys_days{date}} + std::chrono::hours{h} +
         std::chrono::minutes{mi} + std::chrono::seconds{sec} -
         std::chrono::minutes{offset_minutes};
}

}  // namespace detail

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff]][Z|±HH:MM]; 'T' may be a space.
inline std::optional<Timestamp> try_parse_iso(std::string_view s) {
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, off = 0;
  auto expect = [&](char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  };
  if (!detail::read_int(s, pos, 4, 4, y) || !expect('-') ||
      !detail::read_int(s, pos, 2, 2, mo) || !expect('-') ||
      !detail::read_int(s, pos, 2, 2, d)) {
    return std::nullopt;
  }
  if (pos == s.size()) return detail::compose(y, mo, d, 0, 0, 0);
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  if (!detail::read_int(s, pos, 2, 2, h) || !expect(':') ||
      !detail::read_int(s, pos, 2, 2, mi)) {
    return std::nullopt;
  }
  if (expect(':')) {
    if (!detail::read_int(s, pos, 2, 2, sec)) return std::nullopt;
    if (expect('.')) {
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
  }
  if (pos < s.size()) {
    if (expect('Z')) {
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      int oh = 0, om = 0;
      if (!detail::read_int(s, pos, 2, 2, oh)) return std::nullopt;
      expect(':');
      if (!detail::read_int(s, pos, 2, 2, om)) return std::nullopt;
      off = sign * (oh * 60 + om);
    }
  }
  if (pos != s.size()) return std::nullopt;
  return detail::compose(y, mo, d, h, mi, sec, off);
}

// strptime-like subset: %Y %m %d %H %M %S %%; %m/%d/%H/%M/%S accept one or
// two digits. Everything else must match literally.
inline std::optional<Timestamp> try_parse_pattern(std::string_view s,
                                                  std::string_view pattern) {
  if (pattern.empty() || pattern == "iso") return try_parse_iso(s);
  std::size_t pos = 0;
  int y = 1970, mo = 1, d = 1, h = 0, mi = 0, sec = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '%' || i + 1 == pattern.size()) {
      if (pos >= s.size() || s[pos] != pattern[i]) return std::nullopt;
      ++pos;
      continue;
    }
    const char spec = pattern[++i];
    bool ok = true;
    switch (spec) {
      case 'Y': ok = detail::read_int(s, pos, 4, 4, y); break;
      case 'm': ok = detail::read_int(s, pos, 1, 2, mo); break;
      case 'd': ok = detail::read_int(s, pos, 1, 2, d); break;
      case 'H': ok = detail::read_int(s, pos, 1, 2, h); break;
      case 'M': ok = detail::read_int(s, pos, 1, 2, mi); break;
      case 'S': ok = detail::read_int(s, pos, 1, 2, sec); break;
      case '%': ok = pos < s.size() && s[pos++] == '%'; break;
      default: ok = false;
    }
    if (!ok) return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return detail::compose(y, mo, d, h, mi, sec);
}

// Tries the mapping's pattern first, then ISO-8601.
inline std::optional<Timestamp> try_parse_timestamp(std::string_view s,
                                                    std::string_view pattern = "iso") {
  if (auto t = try_parse_pattern(s, pattern)) return t;
  return try_parse_iso(s);
}

inline Timestamp parse_timestamp(std::string_view s, std::string_view pattern = "iso") {
  if (auto t = try_parse_timestamp(s, pattern)) return *t;
  throw Error(errc::parse_error, "unparseable date '" + std::string(s) + "'");
}

inline std::optional<Date> try_parse_date(std::string_view s,
                                          std::string_view pattern = "iso") {
  auto t = try_parse_timestamp(s, pattern);
  if (!t) return std::nullopt;
  return Date{std::chrono::floor<std::chrono::days>(*t)};
}

inline Date parse_date(std::string_view s, std::string_view pattern = "iso") {
  if (auto d = try_parse_date(s, pattern)) return *d;
  throw Error(errc::parse_error, "unparseable date '" + std::string(s) + "'");
}

inline std::string format_timestamp(Timestamp ts) {
  const auto day = std::chrono::floor<std::chrono::days>(ts);
  const Date d{day};
  const std::chrono::hh_mm_ss hms{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline Timestamp now_utc() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace tdledger
