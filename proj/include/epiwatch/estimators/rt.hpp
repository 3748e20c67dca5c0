#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/projector/serial_interval.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epiwatch::estimators {

using projector::SerialInterval;

/// Per-day reproduction numbers. rt[j] is nullopt where the estimate is
/// undefined. After truncation correction, reliable[j] is false for days
/// whose observed serial-interval mass is below the threshold; those keep
/// their raw value.
struct RtSeries {
    RegionKey region;
    Date start;
    std::vector<std::optional<double>> rt;
    std::vector<Count> cases;
    std::vector<bool> reliable;
    bool corrected = false;

    std::size_t size() const noexcept { return rt.size(); }
    Date date_at(std::size_t i) const noexcept { return start + static_cast<std::int64_t>(i); }
    Date end() const noexcept { return date_at(size() - 1); }

    /// Last index with a defined and reliable value.
    std::optional<std::size_t> last_reliable() const {
        for (std::size_t i = size(); i-- > 0;) {
            if (rt[i] && reliable[i]) return i;
        }
        return std::nullopt;
    }
};

/// Wallinga-Teunis case reproduction numbers at day level:
///
///   D_t = sum_{s>=1} N_{t-s} w_s               (infection pressure on day t)
///   R_j = sum_{t>j} N_t w_{t-j} / D_t          (expected offspring of a day-j case)
///
/// Identical to attributing every case on day t to each earlier case k with
/// probability w(t - t_k) / sum_m w(t - t_m). R_j is defined when N_j > 0 and
/// some later observed day lies within the serial-interval support.
inline RtSeries estimate_rt_wt(std::span<const Count> counts, const SerialInterval& si, Date start = Date{}) {
    SerialInterval::validate(si);
    if (counts.size() < 2) {
        throw Error(Errc::InsufficientData, "reproduction number needs at least 2 days");
    }
    const std::size_t T = counts.size();
    const std::size_t S = si.support();

    std::vector<double> pressure(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double d = 0.0;
        for (std::size_t s = 1; s <= std::min(S, t); ++s) {
            d += static_cast<double>(counts[t - s]) * si.weight(s);
        }
        pressure[t] = d;
    }

    RtSeries out;
    out.start = start;
    out.cases.assign(counts.begin(), counts.end());
    out.rt.assign(T, std::nullopt);
    out.reliable.assign(T, true);
    for (std::size_t j = 0; j + 1 < T; ++j) {
        if (counts[j] <= 0) continue;
        const std::size_t last = std::min(T - 1, j + S);
        double r = 0.0;
        bool reachable = false;
        for (std::size_t t = j + 1; t <= last; ++t) {
            const double w = si.weight(t - j);
            if (w <= 0.0) continue;
            reachable = true;
            // pressure[t] >= N_j w > 0 here.
            r += static_cast<double>(counts[t]) * w / pressure[t];
        }
        if (reachable) out.rt[j] = r;
    }
    return out;
}

inline RtSeries estimate_rt_wt(const IncidenceSeries& series, const SerialInterval& si) {
    auto out = estimate_rt_wt(series.confirmed, si, series.start);
    out.region = series.region;
    return out;
}

inline constexpr double kMinObservedMass = 0.2;

/// Divides each value by the serial-interval mass observable before the
/// data freeze, F(T - j). Days with F(T - j) < min_mass are flagged
/// unreliable and left uncorrected.
inline RtSeries right_truncation_correction(const RtSeries& raw, const SerialInterval& si, Date last_observed,
                                            double min_mass = kMinObservedMass) {
    SerialInterval::validate(si);
    if (raw.size() == 0) {
        throw Error(Errc::EmptyInput, "empty reproduction-number series");
    }
    if (last_observed != raw.end()) {
        throw Error(Errc::InvalidParameter, "last_observed " + last_observed.iso() +
                                                " does not match series end " + raw.end().iso());
    }
    RtSeries out = raw;
    out.corrected = true;
    const std::size_t T = raw.size() - 1;
    for (std::size_t j = 0; j <= T; ++j) {
        if (T - j >= si.support()) continue;  // whole interval observed
        const double observed = si.cumulative(T - j);
        if (observed < min_mass) {
            out.reliable[j] = false;
            continue;
        }
        if (out.rt[j]) *out.rt[j] /= observed;
    }
    return out;
}

/// Raw estimate followed by the truncation correction at the series end.
inline RtSeries estimate_rt_corrected(const IncidenceSeries& series, const SerialInterval& si) {
    const auto raw = estimate_rt_wt(series, si);
    return right_truncation_correction(raw, si, series.end());
}

}  // namespace epiwatch::estimators
