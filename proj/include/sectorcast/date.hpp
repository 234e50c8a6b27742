#ifndef SECTORCAST_DATE_HPP
#define SECTORCAST_DATE_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sectorcast {

// Calendar date (no time zone, no time of day). Ordered lexicographically
// by (year, month, day).
struct Date {
    std::int32_t year = 0;
    std::int32_t month = 0;
    std::int32_t day = 0;

    auto operator<=>(const Date&) const = default;
    bool operator==(const Date&) const = default;
};

// Parses strict ISO-8601 `YYYY-MM-DD`. Returns nullopt on any syntactic or
// calendar violation (month 13, Feb 30, ...).
std::optional<Date> parse_date(std::string_view text);

// Formats as `YYYY-MM-DD` (zero padded).
std::string to_string(const Date& d);

}  // namespace sectorcast

#endif  // SECTORCAST_DATE_HPP
