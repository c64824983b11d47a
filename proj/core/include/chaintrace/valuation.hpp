#pragma once

#include "chaintrace/date.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaintrace::valuation {

// USD amounts are integer cents throughout; conversions round half-even.
struct Usd {
    std::int64_t cents = 0;

    friend auto operator<=>(const Usd&, const Usd&) = default;
    Usd& operator+=(Usd o) {
        cents += o.cents;
        return *this;
    }
    friend Usd operator+(Usd a, Usd b) { return {a.cents + b.cents}; }
    friend Usd operator-(Usd a, Usd b) { return {a.cents - b.cents}; }
};

std::string format_usd(Usd v); // "1234.56", no currency sign

// Daily close, a decimal stored exactly as mantissa / 10^frac_digits.
struct Rate {
    std::int64_t mantissa = 0;
    int frac_digits = 0;

    double to_double() const;
};

std::optional<Rate> parse_rate(const std::string& text);

enum class GapPolicy { Strict, CarryForward };

class RateTable {
public:
    // duplicate dates and non-positive rates are rejected
    void insert(const CivilDate& date, Rate rate);

    // Strict throws on a date without a close; CarryForward uses the most
    // recent earlier close and throws only when there is none.
    Rate close(const CivilDate& date, GapPolicy policy = GapPolicy::Strict) const;

    // Transaction dates default to UTC. A nonzero offset shifts the civil-day
    // boundary used when a timestamp is mapped to its close.
    void set_utc_offset_minutes(int minutes) { utc_offset_minutes_ = minutes; }
    int utc_offset_minutes() const { return utc_offset_minutes_; }

    bool empty() const { return rates_.empty(); }
    std::size_t size() const { return rates_.size(); }
    CivilDate min_date() const;
    CivilDate max_date() const;
    std::vector<CivilDate> gaps() const; // dates missing inside [min, max]

private:
    std::map<std::int64_t, Rate> rates_; // key: days since epoch
    int utc_offset_minutes_ = 0;
};

// amount_sats / 1e8 * close(date(t)), rounded half-even to cents.
Usd usd_value(std::int64_t amount_sats, std::int64_t timestamp, const RateTable& rates,
              GapPolicy policy = GapPolicy::Strict);

// CSV with header "date,close_usd", ISO dates, decimal rates.
RateTable load_rates(const std::filesystem::path& path);

} // namespace chaintrace::valuation
