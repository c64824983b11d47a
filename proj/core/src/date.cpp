#include "chaintrace/date.hpp"

#include <cstdio>

namespace chaintrace {

// Low-level civil <-> day-count conversions after Howard Hinnant's
// chrono-compatible algorithms. Valid over the whole int range we care about.
std::int64_t days_from_civil(const CivilDate& d) noexcept {
    std::int64_t y = d.year;
    const int m = d.month;
    const int dy = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);                 // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dy - 1;     // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;                // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);              // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);              // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                   // [0, 11]
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;                           // [1, 31]
    const unsigned m = mp + (mp < 10 ? 3 : -9);                                // [1, 12]
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

CivilDate date_of_timestamp(std::int64_t unix_seconds) noexcept {
    std::int64_t days = unix_seconds / 86400;
    if (unix_seconds % 86400 < 0) --days; // floor toward -inf for pre-epoch times
    return civil_from_days(days);
}

std::int64_t timestamp_of_date(const CivilDate& d) noexcept {
    return days_from_civil(d) * 86400;
}

std::string format_date(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

static bool valid_civil(const CivilDate& d) {
    if (d.month < 1 || d.month > 12 || d.day < 1) return false;
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = mdays[d.month - 1];
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    if (d.month == 2 && leap) dim = 29;
    return d.day <= dim;
}

std::optional<CivilDate> parse_date(const std::string& text) {
    CivilDate d;
    char trailing = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &d.year, &d.month, &d.day, &trailing) != 3)
        return std::nullopt;
    if (!valid_civil(d)) return std::nullopt;
    return d;
}

std::string format_timestamp(std::int64_t unix_seconds) {
    const CivilDate d = date_of_timestamp(unix_seconds);
    std::int64_t rem = unix_seconds - timestamp_of_date(d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
    CivilDate d;
    int hh = 0, mm = 0, ss = 0;
    char zone = 0, trailing = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%c", &d.year, &d.month,
                              &d.day, &hh, &mm, &ss, &zone, &trailing);
    if (n == 3) {
        // bare date, midnight UTC
        if (!valid_civil(d)) return std::nullopt;
        return timestamp_of_date(d);
    }
    if (n < 6 || (n >= 7 && zone != 'Z') || n == 8) return std::nullopt;
    if (!valid_civil(d) || hh > 23 || mm > 59 || ss > 60 || hh < 0 || mm < 0 || ss < 0)
        return std::nullopt;
    return timestamp_of_date(d) + hh * 3600 + mm * 60 + ss;
}

} // namespace chaintrace
