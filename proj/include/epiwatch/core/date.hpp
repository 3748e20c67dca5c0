#pragma once

#include "epiwatch/core/error.hpp"

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace epiwatch {

/// Calendar day stored as days since 1970-01-01. ISO-8601 only at the edges.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int y, unsigned m, unsigned d) {
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{m}, day{d}};
        if (!ymd.ok()) {
            throw Error(Errc::InvalidParameter, "invalid calendar date");
        }
        return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
    }

    /// Strict YYYY-MM-DD.
    static Date parse(std::string_view text) {
        auto bad = [&] { return Error(Errc::InvalidParameter, "unparseable date '" + std::string(text) + "'"); };
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw bad();
        }
        auto field = [&](std::size_t pos, std::size_t len) {
            int value = 0;
            const char* first = text.data() + pos;
            const char* last = first + len;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last) {
                throw bad();
            }
            return value;
        };
        const int y = field(0, 4);
        const int m = field(5, 2);
        const int d = field(8, 2);
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) {
            throw bad();
        }
        return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
    }

    std::string iso() const {
        using namespace std::chrono;
        const year_month_day ymd{sys_days{days{days_}}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    constexpr std::int32_t days_since_epoch() const noexcept { return days_; }

    constexpr Date operator+(std::int64_t n) const noexcept { return Date(static_cast<std::int32_t>(days_ + n)); }
    constexpr Date operator-(std::int64_t n) const noexcept { return Date(static_cast<std::int32_t>(days_ - n)); }
    constexpr std::int64_t operator-(Date other) const noexcept { return std::int64_t{days_} - other.days_; }
    constexpr Date& operator+=(std::int64_t n) noexcept {
        days_ = static_cast<std::int32_t>(days_ + n);
        return *this;
    }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

struct DateRange {
    Date from;
    Date to;
};

}  // namespace epiwatch
