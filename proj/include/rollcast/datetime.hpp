#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace rollcast {

/// Seconds since the Unix epoch. All timestamps in this library are UTC.
using UnixSeconds = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

namespace detail {

// Floor division/modulo for timestamps before the epoch.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

}  // namespace detail

inline int second_of_day(UnixSeconds t) {
    return static_cast<int>(detail::floor_mod(t, kSecondsPerDay));
}

inline int hour_of_day(UnixSeconds t) { return second_of_day(t) / 3600; }

/// 0 = Sunday .. 6 = Saturday.
inline int day_of_week(UnixSeconds t) {
    const std::int64_t days = detail::floor_div(t, kSecondsPerDay);
    return static_cast<int>(detail::floor_mod(days + 4, 7));
}

inline bool is_weekend(UnixSeconds t) {
    const int dow = day_of_week(t);
    return dow == 0 || dow == 6;
}

/// Parses "YYYY-MM-DDTHH:MM:SS" with optional trailing "Z" and either 'T' or a
/// space as the date/time separator. Returns nullopt on malformed input or an
/// invalid calendar date.
inline std::optional<UnixSeconds> parse_iso8601(std::string_view s) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 0;
    char tail[4] = {0, 0, 0, 0};
    const std::string buf(s);
    const int got = std::sscanf(buf.c_str(), "%d-%d-%d%c%d:%d:%d%3s", &year, &month, &day, &sep,
                                &hour, &minute, &second, tail);
    if (got < 7) return std::nullopt;
    if (sep != 'T' && sep != ' ') return std::nullopt;
    if (got == 8 && !(tail[0] == 'Z' && tail[1] == '\0')) return std::nullopt;
    if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 60)
        return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;
    const sys_days sd{ymd};
    return static_cast<UnixSeconds>(sd.time_since_epoch().count()) * kSecondsPerDay + hour * 3600 +
           minute * 60 + second;
}

inline std::string format_iso8601(UnixSeconds t) {
    using namespace std::chrono;
    const std::int64_t days = detail::floor_div(t, kSecondsPerDay);
    const int sod = second_of_day(t);
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), sod / 3600,
                  (sod / 60) % 60, sod % 60);
    return std::string(buf);
}

}  // namespace rollcast
