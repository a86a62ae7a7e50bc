#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hashspread {

// Seconds since the Unix epoch, UTC.
using Instant = std::int64_t;

// Civil days since 1970-01-01 (can be negative).
using DayNumber = std::int32_t;

constexpr std::int64_t kSecondsPerDay = 86400;

// Proleptic Gregorian calendar conversions.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

// Parses an RFC 3339 timestamp ("2016-01-31T12:34:56Z", fractional seconds
// truncated, numeric UTC offsets applied). Returns nullopt on any syntax or
// range violation. Years outside [1, 9999] are rejected.
std::optional<Instant> parse_rfc3339(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Instant t);

// Parses "YYYY-MM-DD".
std::optional<DayNumber> parse_day(std::string_view text);
std::string format_day(DayNumber day);

// Calendar day containing t after shifting by a fixed zone offset.
DayNumber day_of(Instant t, int tz_offset_minutes = 0);

}  // namespace hashspread
