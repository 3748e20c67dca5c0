#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/estimators/rt.hpp"
#include "epiwatch/ingest/snapshot.hpp"
#include "epiwatch/projector/projection.hpp"
#include "epiwatch/projector/serial_interval.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epiwatch::projector {

/// Last reliable value of the truncation-corrected reproduction number.
inline double latest_reliable_rt(std::span<const Count> counts, const SerialInterval& si, Date start = Date{}) {
    const auto raw = estimators::estimate_rt_wt(counts, si, start);
    const auto corrected = estimators::right_truncation_correction(raw, si, raw.end());
    const auto idx = corrected.last_reliable();
    if (!idx) {
        throw Error(Errc::InsufficientData, "no reliable reproduction-number estimate");
    }
    return *corrected.rt[*idx];
}

/// Projects a snapshot region forward from the day after its last report.
/// Without an override the growth driver is the latest reliable corrected
/// reproduction number.
inline ProjectionResult project_region(const ingest::Snapshot& snapshot, std::string_view code,
                                       const SerialInterval& si, const ProjectionParams& params = {},
                                       std::optional<double> rt_override = std::nullopt) {
    const auto& region = snapshot.regions.at(code);
    const auto* series = snapshot.find_series(code);
    if (series == nullptr) {
        throw Error(Errc::InsufficientData, "region '" + std::string(code) + "' has no case series");
    }
    const double rt = rt_override ? *rt_override : latest_reliable_rt(series->confirmed, si, series->start);
    auto result = project(series->confirmed, si, rt, params, series->end() + 1);
    result.region = region;
    return result;
}

struct BacktestReport {
    Date split_date;
    std::size_t horizon = 0;
    std::vector<double> observed_ma;
    std::vector<double> projected_median;
    std::vector<Count> band_low;
    std::vector<Count> band_high;
    /// nullopt when no held-out day has a positive moving average.
    std::optional<double> mape;
    std::size_t comparable_days = 0;
    double coverage_90 = 0.0;
    double rt_used = 0.0;
    /// Latest reliable corrected value once the held-out days are included.
    std::optional<double> rt_realized;
};

/// Estimates rt on days up to and including `split`, projects the following
/// `horizon` days, and scores the projected median against the trailing
/// moving average of what was actually observed.
inline BacktestReport backtest(std::span<const Count> counts, Date start, const SerialInterval& si, Date split,
                               const ProjectionParams& params = {}) {
    if (split < start) {
        throw Error(Errc::InsufficientData, "split date precedes the series");
    }
    const auto split_index = static_cast<std::size_t>(split - start);
    if (split_index + params.horizon >= counts.size()) {
        throw Error(Errc::InsufficientData, "series needs " + std::to_string(params.horizon) +
                                                " held-out days after " + split.iso());
    }
    const auto history = counts.first(split_index + 1);
    const double rt = latest_reliable_rt(history, si, start);
    const auto projection = project(history, si, rt, params, split + 1);

    const auto ma = moving_average(counts, params.ma_window);
    BacktestReport report;
    report.split_date = split;
    report.horizon = params.horizon;
    report.rt_used = rt;
    report.band_low = projection.quantiles.q5;
    report.band_high = projection.quantiles.q95;

    double ape_sum = 0.0;
    std::size_t covered = 0;
    for (std::size_t h = 0; h < params.horizon; ++h) {
        const double observed = ma[split_index + 1 + h];
        const double median = static_cast<double>(projection.quantiles.q50[h]);
        report.observed_ma.push_back(observed);
        report.projected_median.push_back(median);
        if (observed > 0.0) {
            ape_sum += std::abs(median - observed) / observed;
            ++report.comparable_days;
        }
        if (static_cast<double>(projection.quantiles.q5[h]) <= observed &&
            observed <= static_cast<double>(projection.quantiles.q95[h])) {
            ++covered;
        }
    }
    if (report.comparable_days > 0) {
        report.mape = ape_sum / static_cast<double>(report.comparable_days);
    }
    report.coverage_90 = static_cast<double>(covered) / static_cast<double>(params.horizon);
    try {
        report.rt_realized = latest_reliable_rt(counts.first(split_index + 1 + params.horizon), si, start);
    } catch (const Error&) {
    }
    return report;
}

}  // namespace epiwatch::projector
