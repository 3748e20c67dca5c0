#pragma once

#include "epiwatch/core/format.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/estimators/growth.hpp"
#include "epiwatch/estimators/indicators.hpp"
#include "epiwatch/estimators/rt.hpp"
#include "epiwatch/estimators/waves.hpp"
#include "epiwatch/ingest/csv.hpp"
#include "epiwatch/projector/backtest.hpp"
#include "epiwatch/projector/projection.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

// JSON encodings shared by the HTTP service and the CLI. Reals go through
// round6; non-finite reals and undefined estimates become null.
namespace epiwatch::service {

using nlohmann::json;

inline json real(double x) { return std::isfinite(x) ? json(round6(x)) : json(nullptr); }

inline json real(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

inline json reals(std::span<const double> xs) {
    json out = json::array();
    for (double x : xs) out.push_back(real(x));
    return out;
}

inline json date_array(Date start, std::size_t n) {
    json out = json::array();
    for (std::size_t i = 0; i < n; ++i) out.push_back((start + static_cast<std::int64_t>(i)).iso());
    return out;
}

inline json regions_payload(const ingest::RegionRegistry& registry) {
    json out = json::array();
    for (const auto& r : registry.sorted()) {
        out.push_back({{"code", r.code},
                       {"name", r.name},
                       {"level", std::string(to_string(r.level))},
                       {"parent_code", r.parent ? json(*r.parent) : json(nullptr)}});
    }
    return out;
}

inline json series_payload(const IncidenceSeries& s, std::size_t smooth = 0) {
    json out = {{"region", s.region.code},
                {"dates", date_array(s.start, s.size())},
                {"confirmed", s.confirmed},
                {"recovered", s.recovered},
                {"deceased", s.deceased}};
    if (s.tested) out["tested"] = *s.tested;
    if (smooth > 0) out["smoothed"] = reals(moving_average(s.confirmed, smooth));
    return out;
}

inline json rt_payload(const estimators::RtSeries& rt) {
    json values = json::array();
    for (const auto& v : rt.rt) values.push_back(real(v));
    json reliable = json::array();
    for (bool b : rt.reliable) reliable.push_back(b);
    return {{"region", rt.region.code},
            {"dates", date_array(rt.start, rt.size())},
            {"cases", rt.cases},
            {"rt", std::move(values)},
            {"reliable", std::move(reliable)},
            {"corrected", rt.corrected}};
}

inline json growth_payload(const estimators::GrowthFit& fit) {
    return {{"from", fit.window.from.iso()},
            {"to", fit.window.to.iso()},
            {"r", real(fit.r)},
            {"b", real(fit.b)},
            {"r_ci", json::array({real(fit.r_ci.first), real(fit.r_ci.second)})},
            {"doubling_time", real(fit.doubling_time)},
            {"n_points", fit.n_points}};
}

inline json waves_payload(const RegionKey& region, const estimators::WaveMarkers& m) {
    return {{"region", region.code},
            {"first_peak", m.first_peak.iso()},
            {"first_peak_ci", json::array({m.first_peak_ci.first.iso(), m.first_peak_ci.second.iso()})},
            {"valley", m.valley.iso()},
            {"bootstrap_replicates", m.bootstrap_replicates}};
}

inline json indicators_payload(const RegionKey& region, const ingest::PopulationRecord& population,
                               const estimators::IndicatorSet& ind) {
    json out = {{"region", region.code},
                {"population", population.population},
                {"cumulative_confirmed", ind.cumulative_confirmed},
                {"cumulative_deceased", ind.cumulative_deceased},
                {"cases_per_million", real(ind.cases_per_million)},
                {"deaths_per_million", real(ind.deaths_per_million)},
                {"cfr", real(ind.cfr)}};
    if (ind.tests_per_million) out["tests_per_million"] = real(*ind.tests_per_million);
    if (ind.test_positivity) out["test_positivity"] = real(*ind.test_positivity);
    return out;
}

inline json projection_payload(const projector::ProjectionResult& p) {
    const auto& q = p.quantiles;
    return {{"region", p.region.code},
            {"start", p.start.iso()},
            {"horizon", p.horizon},
            {"n_sims", p.trajectories.rows()},
            {"rt_used", real(p.rt_used)},
            {"seed", p.seed},
            {"quantiles", {{"q5", q.q5}, {"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}, {"q95", q.q95}}},
            {"expected", reals(p.expected)}};
}

inline json backtest_payload(const RegionKey& region, const projector::BacktestReport& r) {
    return {{"region", region.code},
            {"split_date", r.split_date.iso()},
            {"horizon", r.horizon},
            {"rt_used", real(r.rt_used)},
            {"rt_realized", real(r.rt_realized)},
            {"observed_ma", reals(r.observed_ma)},
            {"projected_median", reals(r.projected_median)},
            {"band_low", r.band_low},
            {"band_high", r.band_high},
            {"mape", real(r.mape)},
            {"comparable_days", r.comparable_days},
            {"coverage_90", real(r.coverage_90)}};
}

inline json error_payload(std::string_view code, std::string_view message) {
    return {{"error", std::string(code)}, {"message", std::string(message)}};
}

}  // namespace epiwatch::service
