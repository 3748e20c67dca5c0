#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"

#include <algorithm>
#include <concepts>
#include <type_traits>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epiwatch {

using Count = std::int64_t;

enum class Level { nation, state, district };

constexpr std::string_view to_string(Level level) noexcept {
    switch (level) {
    case Level::nation: return "nation";
    case Level::state: return "state";
    case Level::district: return "district";
    }
    return "unknown";
}

inline Level parse_level(std::string_view text) {
    if (text == "nation") return Level::nation;
    if (text == "state") return Level::state;
    if (text == "district") return Level::district;
    throw Error(Errc::InvalidParameter, "unknown region level '" + std::string(text) + "'");
}

/// "IN" is a nation, "IN-MH" a state, "IN-MH-Pune" (or deeper) a district.
inline Level level_from_code(std::string_view code) {
    if (code.empty()) {
        throw Error(Errc::InvalidParameter, "empty region code");
    }
    const auto dashes = std::count(code.begin(), code.end(), '-');
    if (dashes == 0) return Level::nation;
    if (dashes == 1) return Level::state;
    return Level::district;
}

/// Code of the enclosing region implied by the hierarchy, if any.
inline std::optional<std::string> parent_code_of(std::string_view code) {
    const auto pos = code.rfind('-');
    if (pos == std::string_view::npos) {
        return std::nullopt;
    }
    return std::string(code.substr(0, pos));
}

struct RegionKey {
    std::string code;
    std::string name;
    Level level = Level::nation;
    std::optional<std::string> parent;

    bool operator==(const RegionKey&) const = default;
};

/// Gap-free daily counts for one region; index t is start + t days.
struct IncidenceSeries {
    RegionKey region;
    Date start;
    std::vector<Count> confirmed;
    std::vector<Count> recovered;
    std::vector<Count> deceased;
    std::optional<std::vector<Count>> tested;

    std::size_t size() const noexcept { return confirmed.size(); }
    Date date_at(std::size_t index) const noexcept { return start + static_cast<std::int64_t>(index); }
    Date end() const noexcept { return date_at(size() - 1); }

    /// Throws InvalidParameter if the shape or sign invariants are broken.
    void validate() const {
        if (confirmed.empty()) {
            throw Error(Errc::EmptyInput, "series for '" + region.code + "' has no days");
        }
        const auto n = confirmed.size();
        if (recovered.size() != n || deceased.size() != n || (tested && tested->size() != n)) {
            throw Error(Errc::InvalidParameter, "series columns for '" + region.code + "' differ in length");
        }
        auto negative = [](const std::vector<Count>& v) {
            return std::any_of(v.begin(), v.end(), [](Count c) { return c < 0; });
        };
        if (negative(confirmed) || negative(recovered) || negative(deceased) || (tested && negative(*tested))) {
            throw Error(Errc::InvalidParameter, "series for '" + region.code + "' has negative counts");
        }
    }

    bool operator==(const IncidenceSeries&) const = default;
};

/// Trailing moving average; the first window-1 days average over the days
/// available so far.
template <class T>
    requires std::is_arithmetic_v<T>
std::vector<double> moving_average(std::span<const T> series, std::size_t window = 14) {
    if (series.empty()) {
        throw Error(Errc::EmptyInput, "moving_average of empty series");
    }
    if (window == 0) {
        throw Error(Errc::InvalidParameter, "moving_average window must be >= 1");
    }
    std::vector<double> out(series.size());
    long double running = 0.0L;
    for (std::size_t t = 0; t < series.size(); ++t) {
        running += static_cast<long double>(series[t]);
        if (t >= window) {
            running -= static_cast<long double>(series[t - window]);
        }
        const std::size_t n = std::min(window, t + 1);
        out[t] = static_cast<double>(running / static_cast<long double>(n));
    }
    return out;
}

inline std::vector<double> moving_average(const std::vector<Count>& series, std::size_t window = 14) {
    return moving_average(std::span<const Count>(series), window);
}

inline std::vector<Count> cumulative(std::span<const Count> series) {
    if (series.empty()) {
        throw Error(Errc::EmptyInput, "cumulative of empty series");
    }
    std::vector<Count> out(series.size());
    Count total = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        total += series[t];
        out[t] = total;
    }
    return out;
}

/// Inverse of cumulative: out[0] = in[0], out[t] = in[t] - in[t-1].
inline std::vector<Count> day_differences(std::span<const Count> cumulative_series) {
    if (cumulative_series.empty()) {
        throw Error(Errc::EmptyInput, "day_differences of empty series");
    }
    std::vector<Count> out(cumulative_series.size());
    out[0] = cumulative_series[0];
    for (std::size_t t = 1; t < cumulative_series.size(); ++t) {
        out[t] = cumulative_series[t] - cumulative_series[t - 1];
    }
    return out;
}

struct SmoothedSeries {
    std::size_t window = 14;
    std::vector<double> values;
};

inline SmoothedSeries smooth(const IncidenceSeries& series, std::size_t window = 14) {
    return SmoothedSeries{window, moving_average(std::span<const Count>(series.confirmed), window)};
}

/// Restricts `series` to the intersection of [from, to] with its own range.
inline IncidenceSeries align_and_clip(const IncidenceSeries& series, Date from, Date to) {
    if (to < from) {
        throw Error(Errc::InvalidParameter, "clip range ends before it starts");
    }
    if (series.size() == 0) {
        throw Error(Errc::EmptyInput, "clip of empty series");
    }
    const Date lo = std::max(from, series.start);
    const Date hi = std::min(to, series.end());
    if (hi < lo) {
        throw Error(Errc::OutOfRange, "range " + from.iso() + ".." + to.iso() + " does not overlap " +
                                          series.start.iso() + ".." + series.end().iso());
    }
    const auto first = static_cast<std::size_t>(lo - series.start);
    const auto count = static_cast<std::size_t>(hi - lo) + 1;
    auto slice = [&](const std::vector<Count>& v) {
        return std::vector<Count>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                  v.begin() + static_cast<std::ptrdiff_t>(first + count));
    };
    IncidenceSeries out;
    out.region = series.region;
    out.start = lo;
    out.confirmed = slice(series.confirmed);
    out.recovered = slice(series.recovered);
    out.deceased = slice(series.deceased);
    if (series.tested) {
        out.tested = slice(*series.tested);
    }
    return out;
}

/// Index of `date` within the series, or nullopt when outside it.
inline std::optional<std::size_t> index_of(const IncidenceSeries& series, Date date) {
    if (date < series.start || series.end() < date) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(date - series.start);
}

}  // namespace epiwatch
