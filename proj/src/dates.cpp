#include "contractlab/dates.hpp"

#include "contractlab/errors.hpp"

#include <charconv>
#include <cstdio>

namespace contractlab {

namespace {

std::chrono::year_month_day to_ymd(std::chrono::sys_days d) noexcept {
    return std::chrono::year_month_day{d};
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "invalid calendar date %04d-%02u-%02u", year, month, day);
        throw DomainError(buf);
    }
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
    // Expected layout: YYYY-MM-DD (four-digit year).
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw FormatError("bad date '" + std::string(iso) + "': expected YYYY-MM-DD");
    }
    auto parse_uint = [&](std::string_view s, unsigned& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    unsigned y = 0, m = 0, d = 0;
    if (!parse_uint(iso.substr(0, 4), y) || !parse_uint(iso.substr(5, 2), m) ||
        !parse_uint(iso.substr(8, 2), d)) {
        throw FormatError("bad date '" + std::string(iso) + "': expected YYYY-MM-DD");
    }
    try {
        return Date(static_cast<int>(y), m, d);
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
}

Date Date::from_days(std::chrono::sys_days d) noexcept {
    Date out;
    out.days_ = d;
    return out;
}

int Date::year() const noexcept { return static_cast<int>(to_ymd(days_).year()); }
unsigned Date::month() const noexcept { return static_cast<unsigned>(to_ymd(days_).month()); }
unsigned Date::day() const noexcept { return static_cast<unsigned>(to_ymd(days_).day()); }

std::chrono::weekday Date::weekday() const noexcept { return std::chrono::weekday{days_}; }

bool Date::is_weekday() const noexcept {
    const auto wd = weekday();
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Date::operator+(int days) const noexcept {
    return from_days(days_ + std::chrono::days{days});
}

Date Date::operator-(int days) const noexcept {
    return from_days(days_ - std::chrono::days{days});
}

Date last_friday(int year, unsigned month) {
    if (month < 1 || month > 12) {
        throw DomainError("last_friday: month must be in 1..12");
    }
    const std::chrono::year_month_day_last eom{std::chrono::year{year},
                                               std::chrono::month_day_last{std::chrono::month{month}}};
    std::chrono::sys_days d{eom};
    const auto back = (std::chrono::weekday{d} - std::chrono::Friday).count();
    return Date::from_days(d - std::chrono::days{back});
}

}  // namespace contractlab
