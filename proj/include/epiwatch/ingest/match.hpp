#pragma once

#include "epiwatch/core/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiwatch::ingest {

/// Lower-cases ASCII letters, turns every run of punctuation/whitespace into
/// one space, and trims.
inline std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c >= 0x80) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct NamedRegion {
    std::string name;
    std::string code;
};

inline constexpr std::size_t kMaxEditDistance = 2;

/// Resolves a free-text region name: normalized exact match, then alias
/// table, then the unique registry name within edit distance 2. Ties at the
/// minimal distance are an AmbiguousRegion error.
class RegionMatcher {
public:
    RegionMatcher(std::span<const NamedRegion> registry, std::span<const std::pair<std::string, std::string>> aliases) {
        if (registry.empty()) {
            throw Error(Errc::EmptyInput, "region registry is empty");
        }
        for (const auto& r : registry) {
            entries_.push_back({normalize_name(r.name), r.code});
        }
        for (const auto& [alias, code] : aliases) {
            aliases_.emplace(normalize_name(alias), code);
        }
    }

    std::string match(std::string_view raw) const {
        const auto needle = normalize_name(raw);
        std::set<std::string> exact;
        for (const auto& e : entries_) {
            if (e.name == needle) exact.insert(e.code);
        }
        if (exact.size() == 1) return *exact.begin();
        if (exact.size() > 1) {
            throw Error(Errc::AmbiguousRegion, "'" + std::string(raw) + "' names several regions",
                        std::vector<std::string>(exact.begin(), exact.end()));
        }
        if (auto it = aliases_.find(needle); it != aliases_.end()) {
            return it->second;
        }

        std::size_t best = kMaxEditDistance + 1;
        std::set<std::string> best_codes;
        for (const auto& e : entries_) {
            const auto d = levenshtein(needle, e.name);
            if (d < best) {
                best = d;
                best_codes = {e.code};
            } else if (d == best) {
                best_codes.insert(e.code);
            }
        }
        if (best <= kMaxEditDistance && best_codes.size() == 1) {
            return *best_codes.begin();
        }
        if (best <= kMaxEditDistance) {
            throw Error(Errc::AmbiguousRegion, "'" + std::string(raw) + "' is equally close to several regions",
                        std::vector<std::string>(best_codes.begin(), best_codes.end()));
        }
        throw Error(Errc::UnknownRegion, "no region matches '" + std::string(raw) + "'", nearest(raw, 3));
    }

    /// Up to `k` codes ordered by edit distance of their names to `raw`.
    std::vector<std::string> nearest(std::string_view raw, std::size_t k) const {
        const auto needle = normalize_name(raw);
        std::vector<std::pair<std::size_t, std::string>> scored;
        for (const auto& e : entries_) scored.emplace_back(levenshtein(needle, e.name), e.code);
        std::sort(scored.begin(), scored.end());
        std::vector<std::string> out;
        for (const auto& [d, code] : scored) {
            if (out.size() == k) break;
            if (std::find(out.begin(), out.end(), code) == out.end()) out.push_back(code);
        }
        return out;
    }

private:
    struct Entry {
        std::string name;
        std::string code;
    };
    std::vector<Entry> entries_;
    std::map<std::string, std::string> aliases_;
};

inline std::string match_region_name(std::string_view raw, std::span<const NamedRegion> registry,
                                     std::span<const std::pair<std::string, std::string>> aliases) {
    return RegionMatcher(registry, aliases).match(raw);
}

}  // namespace epiwatch::ingest
