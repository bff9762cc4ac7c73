#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace barow {

/// Calendar date (proleptic Gregorian). Serializes as ISO-8601 YYYY-MM-DD.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01.
    std::int64_t to_serial() const;
    static Date from_serial(std::int64_t days);

    Date add_days(int n) const { return from_serial(to_serial() + n); }

    std::string to_string() const;

    /// Parses strict "YYYY-MM-DD". Throws InvalidData on malformed input.
    static Date parse(const std::string& text);

    bool valid() const;
};

} // namespace barow
