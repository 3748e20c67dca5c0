#include "epiwatch/ingest/match.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace epiwatch;
using namespace epiwatch::ingest;

namespace {

std::vector<NamedRegion> states() {
    const char* names[] = {"Andaman and Nicobar Islands", "Andhra Pradesh", "Arunachal Pradesh", "Assam", "Bihar",
                           "Chandigarh", "Chhattisgarh", "Dadra and Nagar Haveli and Daman and Diu", "Delhi", "Goa",
                           "Gujarat", "Haryana", "Himachal Pradesh", "Jammu and Kashmir", "Jharkhand", "Karnataka",
                           "Kerala", "Ladakh", "Lakshadweep", "Madhya Pradesh", "Maharashtra", "Manipur", "Meghalaya",
                           "Mizoram", "Nagaland", "Odisha", "Puducherry", "Punjab", "Rajasthan", "Sikkim",
                           "Tamil Nadu", "Telangana", "Tripura", "Uttar Pradesh", "Uttarakhand", "West Bengal"};
    std::vector<NamedRegion> out;
    int i = 0;
    for (const char* n : names) out.push_back({n, "IN-" + std::to_string(i++)});
    return out;
}

const std::vector<std::pair<std::string, std::string>> kAliases = {{"Pondicherry", "IN-26"}, {"Orissa", "IN-25"}};

std::string code_for(const std::vector<NamedRegion>& reg, std::string_view name) {
    for (const auto& r : reg) {
        if (r.name == name) return r.code;
    }
    return {};
}

}  // namespace

TEST_CASE("normalization folds case and punctuation", "[match]") {
    CHECK(normalize_name("  Jammu & Kashmir ") == "jammu kashmir");
    CHECK(normalize_name("Tamil-Nadu") == "tamil nadu");
    CHECK(normalize_name("PUDUCHERRY") == "puducherry");
    CHECK(normalize_name("") == "");
}

TEST_CASE("exact, alias and fuzzy matches", "[match]") {
    const auto reg = states();
    CHECK(match_region_name("puducherry", reg, kAliases) == code_for(reg, "Puducherry"));
    CHECK(match_region_name("Pondicherry", reg, kAliases) == code_for(reg, "Puducherry"));
    CHECK(match_region_name("Maharashtr", reg, kAliases) == code_for(reg, "Maharashtra"));
    CHECK(match_region_name("tamil   nadu!", reg, kAliases) == code_for(reg, "Tamil Nadu"));
}

TEST_CASE("fuzzy match agrees with a full-table edit distance scan", "[match]") {
    const auto reg = states();
    const std::string raw = "Maharashtr";
    std::size_t best = 100;
    std::vector<std::string> winners;
    for (const auto& r : reg) {
        const auto d = oracle::levenshtein(normalize_name(raw), normalize_name(r.name));
        if (d < best) {
            best = d;
            winners = {r.code};
        } else if (d == best) {
            winners.push_back(r.code);
        }
    }
    REQUIRE(best == 1);
    REQUIRE(winners.size() == 1);
    CHECK(match_region_name(raw, reg, kAliases) == winners[0]);
}

TEST_CASE("levenshtein equals the full matrix oracle", "[match]") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> len(0, 12), ch(0, 3);
    for (int rep = 0; rep < 2000; ++rep) {
        std::string a, b;
        for (int i = len(rng); i > 0; --i) a += char('a' + ch(rng));
        for (int i = len(rng); i > 0; --i) b += char('a' + ch(rng));
        REQUIRE(levenshtein(a, b) == oracle::levenshtein(a, b));
    }
}

TEST_CASE("unknown names report nearest candidates", "[match]") {
    const auto reg = states();
    try {
        match_region_name("Atlantis", reg, kAliases);
        FAIL();
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownRegion);
        CHECK(e.candidates().size() == 3);
    }
}

TEST_CASE("ties at minimal distance are ambiguous", "[match]") {
    const std::vector<NamedRegion> reg{{"Goa", "A"}, {"Gob", "B"}, {"Kerala", "C"}};
    try {
        match_region_name("Goc", reg, {});
        FAIL();
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AmbiguousRegion);
        CHECK(e.candidates() == std::vector<std::string>{"A", "B"});
    }
}

TEST_CASE("every canonical name matches itself", "[match]") {
    const auto reg = states();
    const RegionMatcher m(reg, kAliases);
    for (const auto& r : reg) {
        REQUIRE(m.match(r.name) == r.code);
        REQUIRE(m.match(r.name) == m.match(r.name));
    }
}

TEST_CASE("empty registry is rejected", "[match]") {
    CHECK_THROWS_AS(RegionMatcher({}, {}), Error);
}
