#pragma once

#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/ingest/csv.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace epiwatch::estimators {

struct IndicatorSet {
    Count cumulative_confirmed = 0;
    Count cumulative_deceased = 0;
    double cases_per_million = 0.0;
    double deaths_per_million = 0.0;
    double cfr = 0.0;
    std::optional<double> test_positivity;
    std::optional<double> tests_per_million;
};

inline IndicatorSet indicators(const IncidenceSeries& series, const ingest::PopulationRecord& population) {
    if (population.population < 1) {
        throw Error(Errc::InvalidParameter, "population must be >= 1");
    }
    const auto sum = [](const std::vector<Count>& v) { return std::accumulate(v.begin(), v.end(), Count{0}); };
    const double per_million = 1e6 / static_cast<double>(population.population);

    IndicatorSet out;
    out.cumulative_confirmed = sum(series.confirmed);
    out.cumulative_deceased = sum(series.deceased);
    out.cases_per_million = static_cast<double>(out.cumulative_confirmed) * per_million;
    out.deaths_per_million = static_cast<double>(out.cumulative_deceased) * per_million;
    // Reported deaths can exceed diagnosed cases in inconsistent bulletins; clamp.
    out.cfr = out.cumulative_confirmed == 0
                  ? 0.0
                  : std::min(1.0, static_cast<double>(out.cumulative_deceased) /
                                      static_cast<double>(out.cumulative_confirmed));
    if (series.tested) {
        const Count tests = sum(*series.tested);
        out.tests_per_million = static_cast<double>(tests) * per_million;
        if (tests > 0) {
            out.test_positivity =
                std::min(1.0, static_cast<double>(out.cumulative_confirmed) / static_cast<double>(tests));
        }
    }
    return out;
}

}  // namespace epiwatch::estimators
