#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace contractlab {

/// Calendar date stored as a day count, so comparison and day arithmetic are
/// cheap. Construction validates against the proleptic Gregorian calendar.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);

    /// Parses "YYYY-MM-DD". Throws FormatError on malformed input.
    static Date parse(std::string_view iso);

    static Date from_days(std::chrono::sys_days d) noexcept;

    [[nodiscard]] int year() const noexcept;
    [[nodiscard]] unsigned month() const noexcept;
    [[nodiscard]] unsigned day() const noexcept;
    [[nodiscard]] std::chrono::weekday weekday() const noexcept;
    [[nodiscard]] std::chrono::sys_days days() const noexcept { return days_; }

    /// Monday through Friday.
    [[nodiscard]] bool is_weekday() const noexcept;

    [[nodiscard]] std::string iso() const;

    [[nodiscard]] Date operator+(int days) const noexcept;
    [[nodiscard]] Date operator-(int days) const noexcept;

    /// Difference in calendar days.
    friend int operator-(const Date& a, const Date& b) noexcept {
        return static_cast<int>((a.days_ - b.days_).count());
    }

    auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

/// The last Friday of the given month, the conventional monthly futures
/// settlement date. Valid for any Gregorian year/month.
[[nodiscard]] Date last_friday(int year, unsigned month);

}  // namespace contractlab
