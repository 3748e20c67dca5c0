#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace epiwatch::estimators {

/// ln(2)/r. Negative for decay, where |d| is the halving time.
inline double doubling_time(double r) {
    if (r == 0.0 || !std::isfinite(r)) {
        throw Error(Errc::UndefinedDoubling, "doubling time undefined for r = 0");
    }
    return std::numbers::ln2 / r;
}

struct GrowthFit {
    double r = 0.0;
    double b = 0.0;
    std::pair<double, double> r_ci{0.0, 0.0};
    /// nullopt when r is exactly zero.
    std::optional<double> doubling_time;
    DateRange window{};
    std::size_t n_points = 0;
};

inline constexpr double kZ975 = 1.959963984540054;

/// OLS of ln(count) on the day index over the positive-count days of
/// `counts[first..last]`. t = 0 is `first`, so b is the log-level there.
inline GrowthFit fit_growth_indices(std::span<const Count> counts, std::size_t first, std::size_t last) {
    if (counts.empty() || last < first || last >= counts.size()) {
        throw Error(Errc::InsufficientData, "growth window outside the series");
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = first; i <= last; ++i) {
        if (counts[i] > 0) {
            points.emplace_back(static_cast<double>(i - first), std::log(static_cast<double>(counts[i])));
        }
    }
    if (points.size() < 3) {
        throw Error(Errc::InsufficientData,
                    "growth fit needs at least 3 positive days, got " + std::to_string(points.size()));
    }
    const double n = static_cast<double>(points.size());
    double t_mean = 0.0, y_mean = 0.0;
    for (const auto& [t, y] : points) {
        t_mean += t;
        y_mean += y;
    }
    t_mean /= n;
    y_mean /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, y] : points) {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (y - y_mean);
    }
    GrowthFit fit;
    fit.r = sxy / sxx;
    fit.b = y_mean - fit.r * t_mean;
    double ssr = 0.0;
    for (const auto& [t, y] : points) {
        const double e = y - (fit.b + fit.r * t);
        ssr += e * e;
    }
    const double se = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.r_ci = {fit.r - kZ975 * se, fit.r + kZ975 * se};
    if (fit.r != 0.0) fit.doubling_time = doubling_time(fit.r);
    fit.n_points = points.size();
    return fit;
}

/// Fits over the dates of `window` clipped to the series.
inline GrowthFit fit_growth(std::span<const Count> counts, Date series_start, DateRange window) {
    if (counts.empty()) {
        throw Error(Errc::InsufficientData, "empty series");
    }
    if (window.to < window.from) {
        throw Error(Errc::InvalidParameter, "growth window ends before it starts");
    }
    const Date series_end = series_start + static_cast<std::int64_t>(counts.size() - 1);
    const Date lo = std::max(window.from, series_start);
    const Date hi = std::min(window.to, series_end);
    if (hi < lo) {
        throw Error(Errc::OutOfRange, "growth window does not overlap the series");
    }
    auto fit = fit_growth_indices(counts, static_cast<std::size_t>(lo - series_start),
                                  static_cast<std::size_t>(hi - series_start));
    fit.window = {lo, hi};
    return fit;
}

inline GrowthFit fit_growth(const IncidenceSeries& series, DateRange window) {
    return fit_growth(series.confirmed, series.start, window);
}

}  // namespace epiwatch::estimators
