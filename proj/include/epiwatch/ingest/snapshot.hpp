#pragma once

#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/ingest/csv.hpp"
#include "epiwatch/ingest/match.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace epiwatch::ingest {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline std::string format_timestamp(Timestamp ts) {
    const auto secs = std::chrono::floor<std::chrono::seconds>(ts);
    const auto ms = (ts - secs).count();
    const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

inline Timestamp now_timestamp() {
    return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

/// Validated, immutable image of every ingested file at one refresh instant.
struct Snapshot {
    Timestamp as_of{};
    RegionRegistry regions;
    std::map<std::string, IncidenceSeries, std::less<>> series;
    std::map<std::string, PopulationRecord, std::less<>> populations;
    /// Codes whose series were synthesized as the sum of their children.
    std::set<std::string, std::less<>> aggregated;
    std::vector<AliasRecord> aliases;
    std::vector<ParseWarning> warnings;

    const IncidenceSeries* find_series(std::string_view code) const {
        auto it = series.find(code);
        return it == series.end() ? nullptr : &it->second;
    }

    const PopulationRecord* find_population(std::string_view code) const {
        auto it = populations.find(code);
        return it == populations.end() ? nullptr : &it->second;
    }

    /// Matcher over registry display names plus the alias table.
    RegionMatcher matcher() const {
        std::vector<NamedRegion> named;
        for (const auto& r : regions.sorted()) named.push_back({r.name, r.code});
        std::vector<std::pair<std::string, std::string>> alias_pairs;
        for (const auto& a : aliases) alias_pairs.emplace_back(a.alias, a.region_code);
        return RegionMatcher(named, alias_pairs);
    }
};

namespace detail {

inline IncidenceSeries sum_children(const RegionKey& parent, const std::vector<const IncidenceSeries*>& children) {
    Date lo = children.front()->start;
    Date hi = children.front()->end();
    bool all_tested = true;
    for (const auto* c : children) {
        lo = std::min(lo, c->start);
        hi = std::max(hi, c->end());
        all_tested = all_tested && c->tested.has_value();
    }
    const auto n = static_cast<std::size_t>(hi - lo) + 1;
    IncidenceSeries out;
    out.region = parent;
    out.start = lo;
    out.confirmed.assign(n, 0);
    out.recovered.assign(n, 0);
    out.deceased.assign(n, 0);
    if (all_tested) out.tested = std::vector<Count>(n, 0);
    for (const auto* c : children) {
        const auto offset = static_cast<std::size_t>(c->start - lo);
        for (std::size_t t = 0; t < c->size(); ++t) {
            out.confirmed[offset + t] += c->confirmed[t];
            out.recovered[offset + t] += c->recovered[t];
            out.deceased[offset + t] += c->deceased[t];
            if (all_tested) (*out.tested)[offset + t] += (*c->tested)[t];
        }
    }
    return out;
}

}  // namespace detail

/// Builds gap-filled per-region series and synthesizes state and nation
/// series from their children wherever a parent has no rows of its own.
inline Snapshot build_snapshot(std::span<const CaseRecord> records, std::span<const PopulationRecord> populations,
                               RegionRegistry registry, std::vector<AliasRecord> aliases = {},
                               Timestamp as_of = now_timestamp()) {
    if (records.empty()) {
        throw Error(Errc::EmptyInput, "no case records");
    }
    Snapshot snap;
    snap.as_of = as_of;

    std::map<std::string, std::vector<const CaseRecord*>> grouped;
    for (const auto& r : records) {
        if (!registry.contains(r.region_code)) {
            throw Error(Errc::UnknownRegion, "case record for unregistered region '" + r.region_code + "'");
        }
        grouped[r.region_code].push_back(&r);
    }
    for (const auto& p : populations) {
        if (!registry.contains(p.region_code)) {
            throw Error(Errc::UnknownRegion, "population for unregistered region '" + p.region_code + "'");
        }
        snap.populations.emplace(p.region_code, p);
    }
    for (const auto& a : aliases) {
        if (!registry.contains(a.region_code)) {
            throw Error(Errc::UnknownRegion, "alias '" + a.alias + "' points at unregistered '" + a.region_code + "'");
        }
    }

    for (auto& [code, rows] : grouped) {
        std::sort(rows.begin(), rows.end(), [](const CaseRecord* a, const CaseRecord* b) { return a->date < b->date; });
        const Date lo = rows.front()->date;
        const Date hi = rows.back()->date;
        const auto n = static_cast<std::size_t>(hi - lo) + 1;
        const bool has_tested = std::any_of(rows.begin(), rows.end(), [](const CaseRecord* r) { return r->tested; });
        IncidenceSeries s;
        s.region = registry.at(code);
        s.start = lo;
        s.confirmed.assign(n, 0);
        s.recovered.assign(n, 0);
        s.deceased.assign(n, 0);
        if (has_tested) s.tested = std::vector<Count>(n, 0);
        for (const auto* r : rows) {
            const auto t = static_cast<std::size_t>(r->date - lo);
            s.confirmed[t] += r->confirmed;
            s.recovered[t] += r->recovered;
            s.deceased[t] += r->deceased;
            if (has_tested && r->tested) (*s.tested)[t] += *r->tested;
        }
        snap.series.emplace(code, std::move(s));
    }

    for (const Level level : {Level::state, Level::nation}) {
        for (const auto& region : registry.sorted()) {
            if (region.level != level || snap.series.contains(region.code)) continue;
            std::vector<const IncidenceSeries*> kids;
            for (const auto& child : registry.children(region.code)) {
                if (const auto* s = snap.find_series(child)) kids.push_back(s);
            }
            if (kids.empty()) continue;
            auto summed = detail::sum_children(region, kids);
            snap.series.emplace(region.code, std::move(summed));
            snap.aggregated.insert(region.code);
        }
    }

    snap.regions = std::move(registry);
    snap.aliases = std::move(aliases);
    return snap;
}

/// Case records for every series that was reported rather than synthesized,
/// ordered by (region code, date). Feeding them back to build_snapshot
/// reproduces the snapshot.
inline std::vector<CaseRecord> reported_records(const Snapshot& snap) {
    std::vector<CaseRecord> out;
    for (const auto& [code, s] : snap.series) {
        if (snap.aggregated.contains(code)) continue;
        for (std::size_t t = 0; t < s.size(); ++t) {
            CaseRecord r;
            r.date = s.date_at(t);
            r.region_code = code;
            r.confirmed = s.confirmed[t];
            r.recovered = s.recovered[t];
            r.deceased = s.deceased[t];
            if (s.tested) r.tested = (*s.tested)[t];
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline constexpr const char* kDailyCasesFile = "daily_cases.csv";
inline constexpr const char* kPopulationFile = "population.csv";
inline constexpr const char* kAliasesFile = "aliases.csv";
inline constexpr const char* kRegistryFile = "region_registry.csv";

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace detail {

template <class F>
auto with_file_context(const std::filesystem::path& path, F&& parse) {
    try {
        return parse(read_file(path));
    } catch (const Error& e) {
        if (e.code() == Errc::IoError) throw;
        const auto msg = path.filename().string() + ": " + e.detail();
        if (e.line()) throw Error(e.code(), msg, *e.line());
        throw Error(e.code(), msg, e.candidates());
    }
}

}  // namespace detail

/// Loads the four canonical files from `data_dir`. Errors name the offending
/// file and, for row errors, the line.
inline Snapshot load_snapshot(const std::filesystem::path& data_dir, Timestamp as_of = now_timestamp()) {
    auto registry = detail::with_file_context(data_dir / kRegistryFile, [](const std::string& t) {
        return parse_registry_csv(t);
    });
    auto populations = detail::with_file_context(data_dir / kPopulationFile, [](const std::string& t) {
        return parse_population_csv(t);
    });
    auto aliases = detail::with_file_context(data_dir / kAliasesFile, [](const std::string& t) {
        return parse_alias_csv(t);
    });
    auto daily = detail::with_file_context(data_dir / kDailyCasesFile, [](const std::string& t) {
        return parse_daily_csv(t);
    });
    try {
        auto snap = build_snapshot(daily.records, populations, std::move(registry), std::move(aliases), as_of);
        snap.warnings = std::move(daily.warnings);
        return snap;
    } catch (const Error& e) {
        throw Error(e.code(), std::string(kDailyCasesFile) + ": " + e.detail(), e.candidates());
    }
}

}  // namespace epiwatch::ingest
