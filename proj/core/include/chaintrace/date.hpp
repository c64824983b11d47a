#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace chaintrace {

// All timestamps in the toolkit are UTC unix seconds. Calendar math is done
// with the proleptic Gregorian calendar, no timezone database involved.

struct CivilDate {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    friend auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

// days since 1970-01-01
std::int64_t days_from_civil(const CivilDate& d) noexcept;
CivilDate civil_from_days(std::int64_t days) noexcept;

// UTC calendar date containing the given unix timestamp.
CivilDate date_of_timestamp(std::int64_t unix_seconds) noexcept;

// Midnight UTC of the given date.
std::int64_t timestamp_of_date(const CivilDate& d) noexcept;

// "YYYY-MM-DD"
std::string format_date(const CivilDate& d);
std::optional<CivilDate> parse_date(const std::string& text);

// "YYYY-MM-DDThh:mm:ssZ"
std::string format_timestamp(std::int64_t unix_seconds);
std::optional<std::int64_t> parse_timestamp(const std::string& text);

} // namespace chaintrace
