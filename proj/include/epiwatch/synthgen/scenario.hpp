#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/random.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/projector/projection.hpp"
#include "epiwatch/projector/serial_interval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace epiwatch::synthgen {

using projector::SerialInterval;

struct RtStep {
    std::size_t from_day = 0;
    double r = 1.0;
};

/// Renewal-process scenario with a step-function reproduction number.
struct Scenario {
    std::size_t days = 0;
    std::vector<Count> seed_cases;
    std::vector<RtStep> rt_steps;
    SerialInterval si;
    std::uint64_t seed = 0;
    Date start = Date::from_ymd(2020, 1, 1);
    RegionKey region{"SYN", "Synthetic", Level::nation, std::nullopt};

    /// R for `day`: the last step starting on or before it; days before the
    /// first step use the first step's value.
    double rt_at(std::size_t day) const {
        double r = rt_steps.front().r;
        for (const auto& step : rt_steps) {
            if (step.from_day <= day) r = step.r;
        }
        return r;
    }

    void validate() const {
        SerialInterval::validate(si);
        if (rt_steps.empty()) {
            throw Error(Errc::InvalidParameter, "scenario needs at least one rt step");
        }
        for (std::size_t i = 0; i < rt_steps.size(); ++i) {
            if (!(rt_steps[i].r >= 0.0)) {
                throw Error(Errc::InvalidParameter, "rt step values must be >= 0");
            }
            if (i > 0 && rt_steps[i].from_day <= rt_steps[i - 1].from_day) {
                throw Error(Errc::InvalidParameter, "rt steps must have increasing from_day");
            }
        }
        if (seed_cases.size() < si.support()) {
            throw Error(Errc::InvalidParameter, "seed_cases must cover the serial-interval support (" +
                                                    std::to_string(si.support()) + " days)");
        }
        if (std::any_of(seed_cases.begin(), seed_cases.end(), [](Count c) { return c < 0; })) {
            throw Error(Errc::InvalidParameter, "seed_cases must be non-negative");
        }
        if (days < seed_cases.size()) {
            throw Error(Errc::InvalidParameter, "days must be >= the seeded prefix");
        }
    }
};

/// I_t ~ Poisson(R(t) sum_s w_s I_{t-s}) after the seeded prefix.
inline IncidenceSeries generate(const Scenario& scenario) {
    scenario.validate();
    std::vector<Count> cases(scenario.seed_cases);
    cases.reserve(scenario.days);
    SplitMix64 engine(scenario.seed);
    for (std::size_t t = cases.size(); t < scenario.days; ++t) {
        const double lambda =
            projector::renewal_pressure(std::span<const Count>(cases), scenario.si, scenario.rt_at(t));
        cases.push_back(sample_poisson(lambda, engine));
    }
    IncidenceSeries series;
    series.region = scenario.region;
    series.start = scenario.start;
    series.confirmed = std::move(cases);
    series.recovered.assign(scenario.days, 0);
    series.deceased.assign(scenario.days, 0);
    return series;
}

/// Expected incidence under the scenario: the seeded prefix followed by the
/// noise-free renewal recursion.
inline std::vector<double> expected_incidence(const Scenario& scenario) {
    scenario.validate();
    std::vector<double> path(scenario.seed_cases.begin(), scenario.seed_cases.end());
    for (std::size_t t = path.size(); t < scenario.days; ++t) {
        path.push_back(projector::renewal_pressure(std::span<const double>(path), scenario.si, scenario.rt_at(t)));
    }
    return path;
}

/// Reads the scenario.json schema:
/// {days, seed_cases[], rt_steps[{from_day, r}], si:{shape, scale}, seed}
/// plus optional start_date, region_code and region_name.
inline Scenario parse_scenario(const nlohmann::json& j) {
    try {
        Scenario s;
        s.days = j.at("days").get<std::size_t>();
        s.seed_cases = j.at("seed_cases").get<std::vector<Count>>();
        for (const auto& step : j.at("rt_steps")) {
            s.rt_steps.push_back({step.at("from_day").get<std::size_t>(), step.at("r").get<double>()});
        }
        const auto& si = j.at("si");
        s.si = projector::discretize_serial_interval(si.at("shape").get<double>(), si.at("scale").get<double>());
        s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("start_date")) s.start = Date::parse(j.at("start_date").get<std::string>());
        if (j.contains("region_code")) {
            s.region.code = j.at("region_code").get<std::string>();
            s.region.level = level_from_code(s.region.code);
            s.region.parent = parent_code_of(s.region.code);
        }
        if (j.contains("region_name")) s.region.name = j.at("region_name").get<std::string>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::SchemaError, std::string("scenario: ") + e.what());
    }
}

inline Scenario parse_scenario(const std::string& text) {
    try {
        return parse_scenario(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SchemaError, std::string("scenario: ") + e.what());
    }
}

}  // namespace epiwatch::synthgen
