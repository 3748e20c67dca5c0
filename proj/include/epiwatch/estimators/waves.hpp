#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/random.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/estimators/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace epiwatch::estimators {

struct WaveIndices {
    std::size_t peak = 0;
    std::size_t valley = 0;
};

/// The first wave is the largest fall of the smoothed curve: the pair
/// peak < valley maximizing s[peak] - s[valley]. The peak is then the
/// earliest maximum of s up to the valley, and the valley the earliest
/// minimum of s after the peak. A curve whose largest fall starts on day 0,
/// or that never falls, has no wave structure.
inline WaveIndices find_wave_indices(std::span<const double> smoothed) {
    if (smoothed.size() < 2) {
        throw Error(Errc::NoWaveStructure, "series too short for a wave");
    }
    double best_drop = 0.0;
    std::optional<WaveIndices> best;
    std::size_t running_max = 0;
    for (std::size_t q = 1; q < smoothed.size(); ++q) {
        if (smoothed[q - 1] > smoothed[running_max]) running_max = q - 1;
        const double drop = smoothed[running_max] - smoothed[q];
        if (drop > best_drop) {
            best_drop = drop;
            best = WaveIndices{running_max, q};
        }
    }
    if (!best || best->peak == 0) {
        throw Error(Errc::NoWaveStructure, "smoothed incidence has no interior peak followed by a decline");
    }
    return *best;
}

struct WaveMarkers {
    Date first_peak;
    std::pair<Date, Date> first_peak_ci;
    Date valley;
    std::size_t peak_index = 0;
    std::size_t valley_index = 0;
    std::size_t bootstrap_replicates = 0;
};

struct WaveOptions {
    std::size_t smooth_window = 14;
    std::size_t bootstrap_replicates = 500;
    std::uint64_t seed = 20200919;
    double ci_level = 0.95;
};

namespace detail {

/// Nearest-rank percentile of sorted data: element ceil(p n) - 1.
template <class T>
T nearest_rank(std::span<const T> sorted, double p) {
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

/// Redistributes `total` cases over days with probabilities counts/total.
template <class Engine>
std::vector<Count> multinomial_resample(std::span<const Count> counts, Count total, Engine& engine) {
    std::vector<Count> out(counts.size(), 0);
    Count remaining = total;
    double mass_left = static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size() && remaining > 0; ++i) {
        if (counts[i] <= 0) continue;
        const double p = std::min(1.0, static_cast<double>(counts[i]) / mass_left);
        std::binomial_distribution<Count> draw(remaining, p);
        out[i] = p >= 1.0 ? remaining : draw(engine);
        remaining -= out[i];
        mass_left -= static_cast<double>(counts[i]);
    }
    return out;
}

}  // namespace detail

/// Peak of the first wave and the valley that ends it, on the trailing
/// moving average. The peak interval is a multinomial bootstrap over case
/// days; replicate k draws from sub-stream k of the seed, and replicates
/// without wave structure are dropped.
inline WaveMarkers detect_waves(std::span<const Count> counts, Date start, const WaveOptions& options = {}) {
    if (options.smooth_window == 0) {
        throw Error(Errc::InvalidParameter, "smooth window must be >= 1");
    }
    if (counts.size() < 2 * options.smooth_window) {
        throw Error(Errc::InsufficientData, "wave detection needs at least " +
                                                std::to_string(2 * options.smooth_window) + " days");
    }
    const auto smoothed = moving_average(counts, options.smooth_window);
    const auto idx = find_wave_indices(smoothed);

    WaveMarkers markers;
    markers.peak_index = idx.peak;
    markers.valley_index = idx.valley;
    markers.first_peak = start + static_cast<std::int64_t>(idx.peak);
    markers.valley = start + static_cast<std::int64_t>(idx.valley);

    Count total = 0;
    for (Count c : counts) total += c;
    std::vector<std::size_t> peaks;
    peaks.reserve(options.bootstrap_replicates);
    for (std::size_t k = 0; k < options.bootstrap_replicates; ++k) {
        auto engine = SplitMix64::substream(options.seed, k);
        const auto resampled = detail::multinomial_resample(counts, total, engine);
        const auto s = moving_average(std::span<const Count>(resampled), options.smooth_window);
        try {
            peaks.push_back(find_wave_indices(s).peak);
        } catch (const Error&) {
        }
    }
    markers.bootstrap_replicates = peaks.size();
    if (peaks.empty()) {
        markers.first_peak_ci = {markers.first_peak, markers.first_peak};
    } else {
        std::sort(peaks.begin(), peaks.end());
        const double tail = (1.0 - options.ci_level) / 2.0;
        const std::span<const std::size_t> sorted(peaks);
        markers.first_peak_ci = {start + static_cast<std::int64_t>(detail::nearest_rank(sorted, tail)),
                                 start + static_cast<std::int64_t>(detail::nearest_rank(sorted, 1.0 - tail))};
    }
    return markers;
}

inline WaveMarkers detect_waves(const IncidenceSeries& series, const WaveOptions& options = {}) {
    return detect_waves(series.confirmed, series.start, options);
}

struct WaveGrowth {
    std::optional<GrowthFit> first_wave;
    std::optional<GrowthFit> second_wave;
};

inline constexpr Count kFirstWaveStartCumulative = 10;

/// First wave: from the first day with >= min_cumulative cumulative cases to
/// the peak. Second wave: from the valley to the highest smoothed day after
/// it, or to the series end when that maximum is the last day. A wave whose
/// window has fewer than 3 positive days yields nullopt.
inline WaveGrowth wave_growth(const IncidenceSeries& series, const WaveMarkers& markers,
                              std::size_t smooth_window = 14, Count min_cumulative = kFirstWaveStartCumulative) {
    WaveGrowth out;
    const auto cum = cumulative(series.confirmed);
    const auto first_it = std::find_if(cum.begin(), cum.end(), [&](Count c) { return c >= min_cumulative; });
    const auto first = static_cast<std::size_t>(first_it - cum.begin());
    try {
        if (first < markers.peak_index) {
            out.first_wave = fit_growth_indices(series.confirmed, first, markers.peak_index);
            out.first_wave->window = {series.date_at(first), markers.first_peak};
        }
    } catch (const Error& e) {
        if (e.code() != Errc::InsufficientData) throw;
    }

    const auto smoothed = moving_average(series.confirmed, smooth_window);
    std::size_t second_end = markers.valley_index;
    for (std::size_t i = markers.valley_index; i < smoothed.size(); ++i) {
        if (smoothed[i] > smoothed[second_end]) second_end = i;
    }
    try {
        if (markers.valley_index < second_end) {
            out.second_wave = fit_growth_indices(series.confirmed, markers.valley_index, second_end);
            out.second_wave->window = {markers.valley, series.date_at(second_end)};
        }
    } catch (const Error& e) {
        if (e.code() != Errc::InsufficientData) throw;
    }
    return out;
}

}  // namespace epiwatch::estimators
