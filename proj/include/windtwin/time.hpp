#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace windtwin {

// Seconds since the Unix epoch, UTC. Frames are minute-aligned after averaging.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerMinute = 60;
constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;

inline Timestamp floor_to_minute(Timestamp t) {
  Timestamp q = t / kSecondsPerMinute;
  if (t % kSecondsPerMinute < 0) --q;  // floor for pre-epoch times
  return q * kSecondsPerMinute;
}

namespace time_detail {

// Days from civil date, proleptic Gregorian calendar.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month, day;
};

inline Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

}  // namespace time_detail

inline Timestamp make_timestamp(int year, int month, int day, int hour = 0, int minute = 0,
                                int second = 0) {
  return time_detail::days_from_civil(year, static_cast<unsigned>(month),
                                      static_cast<unsigned>(day)) *
             kSecondsPerDay +
         hour * kSecondsPerHour + minute * kSecondsPerMinute + second;
}

inline std::string format_iso8601(Timestamp t) {
  std::int64_t days = t / kSecondsPerDay;
  std::int64_t sod = t % kSecondsPerDay;
  if (sod < 0) {
    sod += kSecondsPerDay;
    --days;
  }
  const auto c = time_detail::civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(c.year), c.month, c.day,
                static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

// Accepts "YYYY-MM-DDTHH:MM:SS" with 'T' or ' ' as separator and an optional
// trailing 'Z'. Anything else is rejected.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  auto digit = [&](std::size_t i) -> int {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return -1;
    return s[i] - '0';
  };
  auto num = [&](std::size_t i, int n) -> int {
    int v = 0;
    for (int k = 0; k < n; ++k) {
      int d = digit(i + k);
      if (d < 0) return -1;
      v = v * 10 + d;
    }
    return v;
  };
  if (s.size() < 19) return std::nullopt;
  const int year = num(0, 4), mon = num(5, 2), day = num(8, 2);
  const int hh = num(11, 2), mm = num(14, 2), ss = num(17, 2);
  if (year < 0 || mon < 0 || day < 0 || hh < 0 || mm < 0 || ss < 0) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    return std::nullopt;
  std::size_t rest = 19;
  if (rest < s.size() && s[rest] == 'Z') ++rest;
  if (rest != s.size()) return std::nullopt;
  if (mon < 1 || mon > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 59)
    return std::nullopt;
  return make_timestamp(year, mon, day, hh, mm, ss);
}

}  // namespace windtwin
