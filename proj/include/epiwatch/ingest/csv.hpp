#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/series.hpp"

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace epiwatch::ingest {

struct ParseWarning {
    std::size_t line = 0;
    std::string message;
};

namespace detail {

/// Splits text on LF. A trailing CR is dropped from each line; a final empty
/// line (file ending in LF) is not returned.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

/// RFC-4180 style field split: double-quoted fields may contain commas and
/// doubled quotes.
inline std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool field_was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty() && !field_was_quoted) {
            quoted = true;
            field_was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            field_was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted) {
        throw Error(Errc::RowError, "unterminated quoted field", line_no);
    }
    fields.push_back(std::move(current));
    return fields;
}

inline void check_header(std::string_view header_line, std::span<const std::string_view> expected) {
    const auto got = split_fields(header_line, 1);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= got.size() || got[i] != expected[i]) {
            throw Error(Errc::SchemaError, "missing or renamed column '" + std::string(expected[i]) + "'");
        }
    }
    if (got.size() > expected.size()) {
        throw Error(Errc::SchemaError, "unexpected extra column '" + got[expected.size()] + "'");
    }
}

inline Count parse_count(std::string_view field, std::string_view column, std::size_t line_no) {
    Count value = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw Error(Errc::RowError, "unparseable " + std::string(column) + " '" + std::string(field) + "'", line_no);
    }
    return value;
}

inline std::string quote_if_needed(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

inline constexpr std::string_view kDailyColumns[] = {"date", "region_code", "confirmed", "recovered", "deceased",
                                                     "tested"};
inline constexpr std::string_view kPopulationColumns[] = {"region_code", "name", "population"};
inline constexpr std::string_view kAliasColumns[] = {"alias", "region_code"};
inline constexpr std::string_view kRegistryColumns[] = {"region_code", "name", "level", "parent_code"};

struct CaseRecord {
    Date date;
    std::string region_code;
    Count confirmed = 0;
    Count recovered = 0;
    Count deceased = 0;
    std::optional<Count> tested;

    bool operator==(const CaseRecord&) const = default;
};

struct DailyParseResult {
    std::vector<CaseRecord> records;
    std::vector<ParseWarning> warnings;
};

/// Parses daily_cases.csv. Negative counts clamp to zero and duplicate
/// (date, region) rows are summed; both produce warnings. Records keep the
/// order in which their key first appeared.
inline DailyParseResult parse_daily_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) {
        throw Error(Errc::SchemaError, "missing or renamed column 'date'");
    }
    detail::check_header(lines[0], kDailyColumns);

    DailyParseResult result;
    std::map<std::pair<std::int32_t, std::string>, std::size_t> index;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) {
            continue;
        }
        const auto fields = detail::split_fields(lines[i], line_no);
        if (fields.size() != std::size(kDailyColumns)) {
            throw Error(Errc::RowError,
                        "expected " + std::to_string(std::size(kDailyColumns)) + " fields, got " +
                            std::to_string(fields.size()),
                        line_no);
        }
        CaseRecord rec;
        try {
            rec.date = Date::parse(fields[0]);
        } catch (const Error&) {
            throw Error(Errc::RowError, "unparseable date '" + fields[0] + "'", line_no);
        }
        if (fields[1].empty()) {
            throw Error(Errc::RowError, "empty region_code", line_no);
        }
        rec.region_code = fields[1];

        auto clamped = [&](std::size_t col) {
            const Count v = detail::parse_count(fields[col], kDailyColumns[col], line_no);
            if (v < 0) {
                result.warnings.push_back({line_no, std::string(kDailyColumns[col]) + " " + std::to_string(v) +
                                                        " clamped to 0"});
                return Count{0};
            }
            return v;
        };
        rec.confirmed = clamped(2);
        rec.recovered = clamped(3);
        rec.deceased = clamped(4);
        if (!fields[5].empty()) {
            rec.tested = clamped(5);
        }

        auto key = std::make_pair(rec.date.days_since_epoch(), rec.region_code);
        if (auto it = index.find(key); it != index.end()) {
            auto& prev = result.records[it->second];
            prev.confirmed += rec.confirmed;
            prev.recovered += rec.recovered;
            prev.deceased += rec.deceased;
            if (rec.tested) {
                prev.tested = prev.tested.value_or(0) + *rec.tested;
            }
            result.warnings.push_back(
                {line_no, "duplicate row for " + rec.date.iso() + "," + rec.region_code + " summed"});
            continue;
        }
        index.emplace(std::move(key), result.records.size());
        result.records.push_back(std::move(rec));
    }
    return result;
}

struct PopulationRecord {
    std::string region_code;
    std::string name;
    Count population = 1;

    bool operator==(const PopulationRecord&) const = default;
};

inline std::vector<PopulationRecord> parse_population_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) {
        throw Error(Errc::SchemaError, "missing or renamed column 'region_code'");
    }
    detail::check_header(lines[0], kPopulationColumns);
    std::vector<PopulationRecord> out;
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        const auto fields = detail::split_fields(lines[i], line_no);
        if (fields.size() != 3) {
            throw Error(Errc::RowError, "expected 3 fields", line_no);
        }
        PopulationRecord rec{fields[0], fields[1], detail::parse_count(fields[2], "population", line_no)};
        if (rec.population < 1) {
            throw Error(Errc::RowError, "population must be >= 1", line_no);
        }
        if (!seen.emplace(rec.region_code, out.size()).second) {
            throw Error(Errc::RowError, "duplicate population for '" + rec.region_code + "'", line_no);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

struct AliasRecord {
    std::string alias;
    std::string region_code;
};

inline std::vector<AliasRecord> parse_alias_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) {
        throw Error(Errc::SchemaError, "missing or renamed column 'alias'");
    }
    detail::check_header(lines[0], kAliasColumns);
    std::vector<AliasRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        auto fields = detail::split_fields(lines[i], line_no);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw Error(Errc::RowError, "expected 2 non-empty fields", line_no);
        }
        out.push_back({std::move(fields[0]), std::move(fields[1])});
    }
    return out;
}

/// Region hierarchy. Codes are unique; a state's parent is a nation, a
/// district's parent is a state, and a nation has no parent.
class RegionRegistry {
public:
    RegionRegistry() = default;

    explicit RegionRegistry(std::vector<RegionKey> regions) {
        for (auto& r : regions) {
            if (by_code_.contains(r.code)) {
                throw Error(Errc::InvalidParameter, "duplicate region code '" + r.code + "'");
            }
            by_code_.emplace(r.code, std::move(r));
        }
        for (const auto& [code, r] : by_code_) {
            if (level_from_code(code) != r.level) {
                throw Error(Errc::InvalidParameter, "level of '" + code + "' does not match its code");
            }
            if (r.level == Level::nation) {
                if (r.parent) {
                    throw Error(Errc::InvalidParameter, "nation '" + code + "' must not have a parent");
                }
                continue;
            }
            if (!r.parent) {
                throw Error(Errc::InvalidParameter, "region '" + code + "' has no parent");
            }
            auto it = by_code_.find(*r.parent);
            if (it == by_code_.end()) {
                throw Error(Errc::UnknownRegion, "parent '" + *r.parent + "' of '" + code + "' is not registered");
            }
            const Level expected = r.level == Level::district ? Level::state : Level::nation;
            if (it->second.level != expected) {
                throw Error(Errc::InvalidParameter, "parent of '" + code + "' has the wrong level");
            }
        }
    }

    bool contains(std::string_view code) const { return by_code_.find(code) != by_code_.end(); }

    const RegionKey& at(std::string_view code) const {
        auto it = by_code_.find(code);
        if (it == by_code_.end()) {
            throw Error(Errc::UnknownRegion, "unknown region '" + std::string(code) + "'");
        }
        return it->second;
    }

    const RegionKey* find(std::string_view code) const {
        auto it = by_code_.find(code);
        return it == by_code_.end() ? nullptr : &it->second;
    }

    /// All regions sorted by code.
    std::vector<RegionKey> sorted() const {
        std::vector<RegionKey> out;
        out.reserve(by_code_.size());
        for (const auto& [code, r] : by_code_) out.push_back(r);
        return out;
    }

    std::vector<std::string> children(std::string_view code) const {
        std::vector<std::string> out;
        for (const auto& [c, r] : by_code_) {
            if (r.parent && *r.parent == code) out.push_back(c);
        }
        return out;
    }

    std::size_t size() const noexcept { return by_code_.size(); }
    bool empty() const noexcept { return by_code_.empty(); }

    bool operator==(const RegionRegistry&) const = default;

private:
    std::map<std::string, RegionKey, std::less<>> by_code_;
};

inline RegionRegistry parse_registry_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) {
        throw Error(Errc::SchemaError, "missing or renamed column 'region_code'");
    }
    detail::check_header(lines[0], kRegistryColumns);
    std::vector<RegionKey> regions;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        auto fields = detail::split_fields(lines[i], line_no);
        if (fields.size() != 4 || fields[0].empty()) {
            throw Error(Errc::RowError, "expected 4 fields with a region_code", line_no);
        }
        RegionKey key;
        key.code = std::move(fields[0]);
        key.name = std::move(fields[1]);
        try {
            key.level = parse_level(fields[2]);
        } catch (const Error& e) {
            throw Error(Errc::RowError, e.detail(), line_no);
        }
        if (!fields[3].empty()) {
            key.parent = std::move(fields[3]);
        }
        regions.push_back(std::move(key));
    }
    return RegionRegistry(std::move(regions));
}

/// Writes records in the canonical daily_cases.csv layout.
inline std::string write_daily_csv(std::span<const CaseRecord> records) {
    std::string out = "date,region_code,confirmed,recovered,deceased,tested\n";
    for (const auto& r : records) {
        out += r.date.iso();
        out += ',';
        out += detail::quote_if_needed(r.region_code);
        out += ',' + std::to_string(r.confirmed) + ',' + std::to_string(r.recovered) + ',' +
               std::to_string(r.deceased) + ',';
        if (r.tested) out += std::to_string(*r.tested);
        out += '\n';
    }
    return out;
}

inline std::string write_registry_csv(const RegionRegistry& registry) {
    std::string out = "region_code,name,level,parent_code\n";
    for (const auto& r : registry.sorted()) {
        out += detail::quote_if_needed(r.code) + ',' + detail::quote_if_needed(r.name) + ',' +
               std::string(to_string(r.level)) + ',' + (r.parent ? detail::quote_if_needed(*r.parent) : "") + '\n';
    }
    return out;
}

}  // namespace epiwatch::ingest
