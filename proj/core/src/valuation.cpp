#include "chaintrace/valuation.hpp"

#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace chaintrace::valuation {

std::string format_usd(Usd v) {
    const bool negative = v.cents < 0;
    const std::int64_t abs = negative ? -v.cents : v.cents;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%lld.%02d", negative ? "-" : "",
                  static_cast<long long>(abs / 100), static_cast<int>(abs % 100));
    return buf;
}

double Rate::to_double() const {
    double scale = 1.0;
    for (int i = 0; i < frac_digits; ++i) scale *= 10.0;
    return double(mantissa) / scale;
}

std::optional<Rate> parse_rate(const std::string& text) {
    if (text.empty()) return std::nullopt;
    Rate rate;
    std::size_t i = 0;
    bool any_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (rate.mantissa > (INT64_MAX - 9) / 10) return std::nullopt;
            rate.mantissa = rate.mantissa * 10 + (c - '0');
            if (seen_dot) ++rate.frac_digits;
            any_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            return std::nullopt;
        }
    }
    if (!any_digit || rate.frac_digits > 8) return std::nullopt;
    return rate;
}

void RateTable::insert(const CivilDate& date, Rate rate) {
    if (rate.mantissa <= 0) throw data_error("non-positive rate for " + format_date(date));
    const auto [it, inserted] = rates_.try_emplace(days_from_civil(date), rate);
    if (!inserted) throw data_error("duplicate rate date " + format_date(date));
}

Rate RateTable::close(const CivilDate& date, GapPolicy policy) const {
    const std::int64_t day = days_from_civil(date);
    const auto it = rates_.find(day);
    if (it != rates_.end()) return it->second;
    if (policy == GapPolicy::CarryForward) {
        auto ub = rates_.upper_bound(day);
        if (ub != rates_.begin()) return std::prev(ub)->second;
    }
    throw data_error("missing close rate for " + format_date(date));
}

CivilDate RateTable::min_date() const {
    if (rates_.empty()) throw data_error("empty rate table");
    return civil_from_days(rates_.begin()->first);
}

CivilDate RateTable::max_date() const {
    if (rates_.empty()) throw data_error("empty rate table");
    return civil_from_days(rates_.rbegin()->first);
}

std::vector<CivilDate> RateTable::gaps() const {
    std::vector<CivilDate> out;
    if (rates_.empty()) return out;
    for (std::int64_t d = rates_.begin()->first; d <= rates_.rbegin()->first; ++d)
        if (!rates_.count(d)) out.push_back(civil_from_days(d));
    return out;
}

namespace {

// round-half-even division of non-negative n by positive d
std::int64_t div_half_even(unsigned __int128 n, unsigned __int128 d) {
    const unsigned __int128 q = n / d;
    const unsigned __int128 r2 = (n % d) * 2;
    if (r2 > d || (r2 == d && (q & 1))) return std::int64_t(q) + 1;
    return std::int64_t(q);
}

} // namespace

Usd usd_value(std::int64_t amount_sats, std::int64_t timestamp, const RateTable& rates,
              GapPolicy policy) {
    if (amount_sats < 0) throw data_error("negative amount");
    const Rate rate =
        rates.close(date_of_timestamp(timestamp + rates.utc_offset_minutes() * 60), policy);
    // cents = sats * mantissa / 10^(6 + frac_digits), exactly
    unsigned __int128 denom = 1'000'000;
    for (int i = 0; i < rate.frac_digits; ++i) denom *= 10;
    const unsigned __int128 numer =
        static_cast<unsigned __int128>(amount_sats) * static_cast<unsigned __int128>(rate.mantissa);
    return Usd{div_half_even(numer, denom)};
}

RateTable load_rates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open rate file " + path.string());
    RateTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "date") continue; // header
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        if (fields.size() != 2) throw data_error(where + ": expected date,close_usd");
        const auto date = parse_date(fields[0]);
        if (!date) throw data_error(where + ": unparseable date '" + fields[0] + "'");
        const auto rate = parse_rate(fields[1]);
        if (!rate) throw data_error(where + ": unparseable rate '" + fields[1] + "'");
        table.insert(*date, *rate);
    }
    return table;
}

} // namespace chaintrace::valuation
