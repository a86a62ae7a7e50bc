#include "hashspread/timeutil.hpp"

#include <cstdio>

namespace hashspread {

// Howard Hinnant's algorithms, http://howardhinnant.github.io/date_algorithms.html
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

namespace {

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

bool days_in_month_ok(unsigned y, unsigned m, unsigned d) {
    static const unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    unsigned len = lengths[m - 1];
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) len = 29;
    return d <= len;
}

}  // namespace

std::optional<Instant> parse_rfc3339(std::string_view s) {
    unsigned year, month, day, hour, minute, second;
    if (!parse_fixed_uint(s, 0, 4, year)) return std::nullopt;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_fixed_uint(s, 5, 2, month) || !parse_fixed_uint(s, 8, 2, day)) return std::nullopt;
    char sep = s[10];
    if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
    if (!parse_fixed_uint(s, 11, 2, hour) || s[13] != ':' ||
        !parse_fixed_uint(s, 14, 2, minute) || s[16] != ':' ||
        !parse_fixed_uint(s, 17, 2, second)) {
        return std::nullopt;
    }
    if (year < 1 || year > 9999) return std::nullopt;
    if (!days_in_month_ok(year, month, day)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    if (second == 60) second = 59;  // fold leap seconds

    std::size_t pos = 19;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;

    int offset_seconds = 0;
    char z = s[pos];
    if (z == 'Z' || z == 'z') {
        ++pos;
    } else if (z == '+' || z == '-') {
        unsigned oh, om;
        if (!parse_fixed_uint(s, pos + 1, 2, oh)) return std::nullopt;
        if (pos + 3 >= s.size() || s[pos + 3] != ':') return std::nullopt;
        if (!parse_fixed_uint(s, pos + 4, 2, om)) return std::nullopt;
        if (oh > 23 || om > 59) return std::nullopt;
        offset_seconds = static_cast<int>(oh * 3600 + om * 60);
        if (z == '-') offset_seconds = -offset_seconds;
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;

    std::int64_t days = days_from_civil(static_cast<int>(year), month, day);
    std::int64_t t = days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
    return t - offset_seconds;
}

std::string format_rfc3339(Instant t) {
    std::int64_t days = t / kSecondsPerDay;
    std::int64_t rem = t % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::optional<DayNumber> parse_day(std::string_view s) {
    unsigned year, month, day;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_fixed_uint(s, 0, 4, year) || !parse_fixed_uint(s, 5, 2, month) ||
        !parse_fixed_uint(s, 8, 2, day)) {
        return std::nullopt;
    }
    if (year < 1 || year > 9999 || !days_in_month_ok(year, month, day)) return std::nullopt;
    return static_cast<DayNumber>(days_from_civil(static_cast<int>(year), month, day));
}

std::string format_day(DayNumber day) {
    int y;
    unsigned m, d;
    civil_from_days(day, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

DayNumber day_of(Instant t, int tz_offset_minutes) {
    std::int64_t shifted = t + static_cast<std::int64_t>(tz_offset_minutes) * 60;
    std::int64_t d = shifted / kSecondsPerDay;
    if (shifted % kSecondsPerDay < 0) --d;
    return static_cast<DayNumber>(d);
}

}  // namespace hashspread
