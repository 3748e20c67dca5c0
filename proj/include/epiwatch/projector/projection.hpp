#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/format.hpp"
#include "epiwatch/core/random.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/projector/serial_interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace epiwatch::projector {

/// Force of infection on the day after `past`: rt * sum_s w_s past[end - s].
template <class T>
double renewal_pressure(std::span<const T> past, const SerialInterval& si, double rt) {
    double lambda = 0.0;
    const std::size_t n = past.size();
    for (std::size_t s = 1; s <= std::min(si.support(), n); ++s) {
        lambda += si.weight(s) * static_cast<double>(past[n - s]);
    }
    return rt * lambda;
}

/// Noise-free renewal recursion: each projected day is its own expectation
/// and feeds the following days.
template <class T>
std::vector<double> expected_renewal(std::span<const T> history, const SerialInterval& si, double rt,
                                     std::size_t horizon) {
    std::vector<double> path(history.begin(), history.end());
    path.reserve(history.size() + horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        path.push_back(renewal_pressure(std::span<const double>(path), si, rt));
    }
    return {path.end() - static_cast<std::ptrdiff_t>(horizon), path.end()};
}

/// Row-major n_sims x horizon matrix of simulated daily counts.
class TrajectoryMatrix {
public:
    TrajectoryMatrix() = default;
    TrajectoryMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<Count> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const Count> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    Count operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    /// Column j across all rows.
    std::vector<Count> column(std::size_t j) const {
        std::vector<Count> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    bool operator==(const TrajectoryMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Count> data_;
};

struct QuantileBands {
    std::vector<Count> q5, q25, q50, q75, q95;

    bool operator==(const QuantileBands&) const = default;
};

/// Nearest-rank quantile: the ceil(percent n / 100)-th smallest value.
inline Count nearest_rank_quantile(std::span<const Count> sorted, unsigned percent) {
    const auto n = sorted.size();
    auto rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

inline QuantileBands quantile_bands(const TrajectoryMatrix& m) {
    QuantileBands bands;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        auto col = m.column(j);
        std::sort(col.begin(), col.end());
        bands.q5.push_back(nearest_rank_quantile(col, 5));
        bands.q25.push_back(nearest_rank_quantile(col, 25));
        bands.q50.push_back(nearest_rank_quantile(col, 50));
        bands.q75.push_back(nearest_rank_quantile(col, 75));
        bands.q95.push_back(nearest_rank_quantile(col, 95));
    }
    return bands;
}

inline constexpr std::size_t kDefaultHorizon = 15;
inline constexpr std::size_t kDefaultSims = 1000;
inline constexpr std::uint64_t kDefaultSeed = 42;

enum class SeedMode { raw, moving_average };

struct ProjectionParams {
    std::size_t horizon = kDefaultHorizon;
    std::size_t n_sims = kDefaultSims;
    std::uint64_t seed = kDefaultSeed;
    SeedMode seed_mode = SeedMode::raw;
    std::size_t ma_window = 14;
};

struct ProjectionResult {
    RegionKey region;
    Date start;
    std::size_t horizon = 0;
    TrajectoryMatrix trajectories;
    QuantileBands quantiles;
    std::vector<double> expected;
    double rt_used = 0.0;
    std::uint64_t seed = 0;
};

/// Poisson branching projection. Each trajectory conditions on its own
/// simulated past; trajectory i draws from sub-stream i of the seed.
/// `start` is the first projected day.
inline ProjectionResult project(std::span<const Count> history, const SerialInterval& si, double rt,
                                const ProjectionParams& params = {}, Date start = Date{}) {
    SerialInterval::validate(si);
    if (history.size() < si.support()) {
        throw Error(Errc::InsufficientData, "projection needs at least " + std::to_string(si.support()) +
                                                " days of history, got " + std::to_string(history.size()));
    }
    if (!(rt >= 0.0) || !std::isfinite(rt)) {
        throw Error(Errc::InvalidParameter, "rt must be finite and >= 0");
    }
    if (params.horizon < 1 || params.n_sims < 1) {
        throw Error(Errc::InvalidParameter, "horizon and n_sims must be >= 1");
    }

    std::vector<double> seed_history;
    if (params.seed_mode == SeedMode::moving_average) {
        seed_history = moving_average(history, params.ma_window);
    } else {
        seed_history.assign(history.begin(), history.end());
    }
    // Only the last S days of history can influence the projection.
    const std::size_t keep = si.support();
    const std::vector<double> tail(seed_history.end() - static_cast<std::ptrdiff_t>(keep), seed_history.end());

    ProjectionResult result;
    result.start = start;
    result.horizon = params.horizon;
    result.rt_used = rt;
    result.seed = params.seed;
    result.expected = expected_renewal(std::span<const double>(tail), si, rt, params.horizon);
    result.trajectories = TrajectoryMatrix(params.n_sims, params.horizon);

    std::vector<double> path;
    for (std::size_t i = 0; i < params.n_sims; ++i) {
        auto engine = SplitMix64::substream(params.seed, i);
        path.assign(tail.begin(), tail.end());
        auto row = result.trajectories.row(i);
        for (std::size_t h = 0; h < params.horizon; ++h) {
            const double lambda = renewal_pressure(std::span<const double>(path), si, rt);
            const Count draw = sample_poisson(lambda, engine);
            row[h] = draw;
            path.push_back(static_cast<double>(draw));
        }
    }
    result.quantiles = quantile_bands(result.trajectories);
    return result;
}

/// Cumulative-incidence bands: each trajectory is cumulated and offset by
/// the historical total before quantiles are taken.
inline QuantileBands cumulative_projection(const ProjectionResult& result, std::span<const Count> history) {
    Count offset = 0;
    for (Count c : history) offset += c;
    const auto& m = result.trajectories;
    TrajectoryMatrix cum(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Count running = offset;
        auto src = m.row(i);
        auto dst = cum.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            running += src[j];
            dst[j] = running;
        }
    }
    return quantile_bands(cum);
}

/// One row per projected day: `day,q5,q25,q50,q75,q95,expected`.
inline std::string projection_csv(const ProjectionResult& result) {
    std::string out = "day,q5,q25,q50,q75,q95,expected\n";
    const auto& q = result.quantiles;
    for (std::size_t h = 0; h < result.horizon; ++h) {
        out += (result.start + static_cast<std::int64_t>(h)).iso();
        for (const auto* band : {&q.q5, &q.q25, &q.q50, &q.q75, &q.q95}) {
            out += ',' + std::to_string((*band)[h]);
        }
        out += ',' + format_real(round6(result.expected[h])) + '\n';
    }
    return out;
}

}  // namespace epiwatch::projector
