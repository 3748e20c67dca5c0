#include "epiwatch/epiwatch.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <map>

using namespace epiwatch;
using namespace epiwatch::ingest;

namespace {

const std::string kHeader = "date,region_code,confirmed,recovered,deceased,tested\n";

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::IoError;
}

std::size_t line_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.line().value_or(0);
    }
    return 0;
}

RegionRegistry two_district_registry() {
    return parse_registry_csv(
        "region_code,name,level,parent_code\n"
        "IN,India,nation,\n"
        "IN-KL,Kerala,state,IN\n"
        "IN-KL-A,Alpha,district,IN-KL\n"
        "IN-KL-B,Beta,district,IN-KL\n");
}

}  // namespace

TEST_CASE("single daily row parses to one record", "[ingest]") {
    const auto r = parse_daily_csv(kHeader + "2020-09-19,IN,92000,85000,1100,900000\n");
    REQUIRE(r.records.size() == 1);
    CHECK(r.warnings.empty());
    const auto& rec = r.records[0];
    CHECK(rec.date == Date::parse("2020-09-19"));
    CHECK(rec.region_code == "IN");
    CHECK(rec.confirmed == 92000);
    CHECK(rec.recovered == 85000);
    CHECK(rec.deceased == 1100);
    CHECK(rec.tested == 900000);
}

TEST_CASE("empty tested field stays absent and CRLF is tolerated", "[ingest]") {
    const auto r = parse_daily_csv("date,region_code,confirmed,recovered,deceased,tested\r\n2020-03-01,IN,1,0,0,\r\n");
    REQUIRE(r.records.size() == 1);
    CHECK_FALSE(r.records[0].tested);
}

TEST_CASE("negative counts clamp to zero with a warning", "[ingest]") {
    const auto r = parse_daily_csv(kHeader + "2020-09-19,IN,-50,10,0,\n");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].confirmed == 0);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].line == 2);
}

TEST_CASE("header problems name the column", "[ingest]") {
    CHECK(code_of([] { parse_daily_csv("date,region,confirmed,recovered,deceased,tested\n"); }) == Errc::SchemaError);
    try {
        parse_daily_csv("date,region_code,confirmed,recovered,tested\n");
        FAIL();
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("deceased") != std::string::npos);
    }
    CHECK(code_of([] { parse_daily_csv(""); }) == Errc::SchemaError);
    CHECK(code_of([] { parse_population_csv("code,name,population\n"); }) == Errc::SchemaError);
    CHECK(code_of([] { parse_alias_csv("alias\n"); }) == Errc::SchemaError);
    CHECK(code_of([] { parse_registry_csv("region_code,name,level\n"); }) == Errc::SchemaError);
}

TEST_CASE("bad rows carry the line number", "[ingest]") {
    const auto bad_date = kHeader + "2020-03-01,IN,1,0,0,\n2020-13-01,IN,1,0,0,\n";
    CHECK(code_of([&] { parse_daily_csv(bad_date); }) == Errc::RowError);
    CHECK(line_of([&] { parse_daily_csv(bad_date); }) == 3);
    const auto bad_count = kHeader + "2020-03-01,IN,1x,0,0,\n";
    CHECK(code_of([&] { parse_daily_csv(bad_count); }) == Errc::RowError);
    CHECK(line_of([&] { parse_daily_csv(bad_count); }) == 2);
    const auto short_row = kHeader + "2020-03-01,IN,1,0\n";
    CHECK(line_of([&] { parse_daily_csv(short_row); }) == 2);
}

TEST_CASE("duplicate keys are summed and match a group-by oracle", "[ingest]") {
    SplitMix64 rng(99);
    std::string text = kHeader;
    std::vector<std::tuple<std::string, std::string, Count>> rows;
    const Date start = Date::parse("2020-01-01");
    for (int i = 0; i < 997; ++i) {
        rows.emplace_back((start + i / 4).iso(), "IN-S" + std::string(1, char('A' + i % 4)),
                          static_cast<Count>(rng() % 500));
    }
    for (int k : {5, 300, 800}) rows.push_back({std::get<0>(rows[k]), std::get<1>(rows[k]), 7});
    std::map<std::string, Count> want;
    for (const auto& [d, c, v] : rows) {
        text += d + "," + c + "," + std::to_string(v) + ",1,2,\n";
        want[d + "|" + c] += v;
    }
    REQUIRE(rows.size() == 1000);
    const auto r = parse_daily_csv(text);
    CHECK(r.records.size() == 997);
    CHECK(r.warnings.size() == 3);
    for (const auto& rec : r.records) {
        REQUIRE(rec.confirmed == want.at(rec.date.iso() + "|" + rec.region_code));
    }
    std::size_t doubled = 0;
    for (const auto& rec : r.records) doubled += rec.recovered == 2 ? 1 : 0;
    CHECK(doubled == 3);
}

TEST_CASE("parse_daily_csv never yields negatives", "[ingest]") {
    SplitMix64 rng(1);
    std::string text = kHeader;
    for (int i = 0; i < 300; ++i) {
        auto v = [&] { return std::to_string(static_cast<long long>(rng() % 2001) - 1000); };
        text += (Date::parse("2020-01-01") + i).iso() + ",IN," + v() + "," + v() + "," + v() + "," + v() + "\n";
    }
    for (const auto& rec : parse_daily_csv(text).records) {
        REQUIRE(rec.confirmed >= 0);
        REQUIRE(rec.recovered >= 0);
        REQUIRE(rec.deceased >= 0);
        REQUIRE(rec.tested.value_or(0) >= 0);
    }
}

TEST_CASE("population rows must be positive and unique", "[ingest]") {
    const auto p = parse_population_csv("region_code,name,population\nIN,India,1210854977\n");
    REQUIRE(p.size() == 1);
    CHECK(p[0].population == 1210854977);
    CHECK(code_of([] { parse_population_csv("region_code,name,population\nIN,India,0\n"); }) == Errc::RowError);
    CHECK(code_of([] { parse_population_csv("region_code,name,population\nIN,India,5\nIN,India,6\n"); }) ==
          Errc::RowError);
}

TEST_CASE("registry enforces hierarchy", "[ingest]") {
    const auto reg = two_district_registry();
    CHECK(reg.size() == 4);
    CHECK(reg.children("IN-KL") == std::vector<std::string>{"IN-KL-A", "IN-KL-B"});
    CHECK(reg.at("IN-KL").parent == std::optional<std::string>("IN"));
    CHECK(code_of([&] { (void)reg.at("XX"); }) == Errc::UnknownRegion);
    CHECK_THROWS_AS(parse_registry_csv("region_code,name,level,parent_code\nIN-KL,Kerala,state,IN\n"), Error);
    CHECK_THROWS_AS(parse_registry_csv("region_code,name,level,parent_code\nIN,India,state,\n"), Error);
    CHECK_THROWS_AS(
        parse_registry_csv("region_code,name,level,parent_code\nIN,India,nation,\nIN,India,nation,\n"), Error);
}

TEST_CASE("gap days are zero filled", "[ingest]") {
    const auto reg = two_district_registry();
    const auto r = parse_daily_csv(kHeader + "2020-03-01,IN-KL-A,5,1,0,\n2020-03-03,IN-KL-A,7,2,1,\n");
    const auto snap = build_snapshot(r.records, {}, reg);
    const auto* s = snap.find_series("IN-KL-A");
    REQUIRE(s != nullptr);
    CHECK(s->confirmed == std::vector<Count>{5, 0, 7});
    CHECK(s->recovered == std::vector<Count>{1, 0, 2});
    CHECK(snap.aggregated.contains("IN-KL"));
    CHECK(snap.aggregated.contains("IN"));
    CHECK_FALSE(snap.aggregated.contains("IN-KL-A"));
}

TEST_CASE("state is the day-wise sum of its districts", "[ingest]") {
    const auto reg = two_district_registry();
    const auto r = parse_daily_csv(kHeader +
                                   "2020-03-01,IN-KL-A,5,1,0,10\n2020-03-02,IN-KL-A,6,1,0,11\n"
                                   "2020-03-02,IN-KL-B,3,0,1,12\n2020-03-03,IN-KL-B,4,0,0,13\n");
    const auto snap = build_snapshot(r.records, {}, reg);
    const auto& st = *snap.find_series("IN-KL");
    CHECK(st.start == Date::parse("2020-03-01"));
    CHECK(st.confirmed == std::vector<Count>{5, 9, 4});
    CHECK(st.deceased == std::vector<Count>{0, 1, 0});
    REQUIRE(st.tested);
    CHECK(*st.tested == std::vector<Count>{10, 23, 13});
    CHECK(snap.find_series("IN")->confirmed == st.confirmed);
}

TEST_CASE("parent tested column requires every child to report it", "[ingest]") {
    const auto reg = two_district_registry();
    const auto r = parse_daily_csv(kHeader + "2020-03-01,IN-KL-A,5,1,0,10\n2020-03-01,IN-KL-B,3,0,1,\n");
    const auto snap = build_snapshot(r.records, {}, reg);
    CHECK_FALSE(snap.find_series("IN-KL")->tested);
}

TEST_CASE("nation equals a nested sum over a ten-district fixture", "[ingest]") {
    std::string registry = "region_code,name,level,parent_code\nIN,India,nation,\n";
    for (int s = 0; s < 3; ++s) registry += "IN-S" + std::to_string(s) + ",State " + std::to_string(s) + ",state,IN\n";
    std::vector<std::string> districts;
    for (int d = 0; d < 10; ++d) {
        const auto state = "IN-S" + std::to_string(d % 3);
        districts.push_back(state + "-D" + std::to_string(d));
        registry += districts.back() + ",District " + std::to_string(d) + ",district," + state + "\n";
    }
    const auto reg = parse_registry_csv(registry);
    SplitMix64 rng(8);
    std::string text = kHeader;
    std::map<std::string, std::map<std::string, std::map<std::string, Count>>> nested;
    for (int t = 0; t < 40; ++t) {
        for (std::size_t d = 0; d < districts.size(); ++d) {
            if (rng() % 5 == 0) continue;
            const auto v = static_cast<Count>(rng() % 100);
            const auto day = (Date::parse("2020-04-01") + t).iso();
            text += day + "," + districts[d] + "," + std::to_string(v) + ",0,0,\n";
            nested[day]["IN-S" + std::to_string(d % 3)][districts[d]] += v;
        }
    }
    const auto snap = build_snapshot(parse_daily_csv(text).records, {}, reg);
    const auto& nation = *snap.find_series("IN");
    for (std::size_t t = 0; t < nation.size(); ++t) {
        Count want = 0;
        if (auto it = nested.find(nation.date_at(t).iso()); it != nested.end()) {
            for (const auto& [state, ds] : it->second) {
                for (const auto& [dist, v] : ds) want += v;
            }
        }
        REQUIRE(nation.confirmed[t] == want);
    }
    for (const auto& region : reg.sorted()) {
        const auto kids = reg.children(region.code);
        if (kids.empty() || !snap.aggregated.contains(region.code)) continue;
        const auto& parent = *snap.find_series(region.code);
        for (std::size_t t = 0; t < parent.size(); ++t) {
            Count sum = 0;
            for (const auto& k : kids) {
                const auto* c = snap.find_series(k);
                if (auto i = index_of(*c, parent.date_at(t))) sum += c->confirmed[*i];
            }
            REQUIRE(parent.confirmed[t] == sum);
        }
    }
}

TEST_CASE("snapshot errors", "[ingest]") {
    const auto reg = two_district_registry();
    CHECK(code_of([&] { build_snapshot(std::vector<CaseRecord>{}, {}, reg); }) == Errc::EmptyInput);
    const auto r = parse_daily_csv(kHeader + "2020-03-01,IN-XX,5,1,0,\n");
    CHECK(code_of([&] { build_snapshot(r.records, {}, reg); }) == Errc::UnknownRegion);
}

TEST_CASE("reported records round-trip through canonical CSV", "[ingest]") {
    fixtures::TempDir dir("roundtrip");
    fixtures::SmallDataset data;
    data.write(dir.path());
    const auto ts = Timestamp{std::chrono::milliseconds(1600000000000)};
    const auto snap = load_snapshot(dir.path(), ts);
    const auto records = reported_records(snap);
    const auto again = build_snapshot(parse_daily_csv(write_daily_csv(records)).records,
                                      parse_population_csv(data.population), snap.regions, snap.aliases, ts);
    CHECK(again.series == snap.series);
    CHECK(again.aggregated == snap.aggregated);
    CHECK(again.populations == snap.populations);
    CHECK(parse_registry_csv(write_registry_csv(snap.regions)) == snap.regions);
}

TEST_CASE("load_snapshot reports the failing file and line", "[ingest]") {
    fixtures::TempDir dir("badload");
    fixtures::SmallDataset data;
    data.daily += "2020-99-01,IN-BB,1,0,0,\n";
    data.write(dir.path());
    try {
        load_snapshot(dir.path());
        FAIL();
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RowError);
        CHECK(std::string(e.what()).find("daily_cases.csv") != std::string::npos);
        CHECK(e.line().value_or(0) > 1);
    }
    std::filesystem::remove(dir / "population.csv");
    CHECK(code_of([&] { load_snapshot(dir.path()); }) == Errc::IoError);
}

TEST_CASE("bundled sample dataset loads cleanly", "[ingest]") {
    const auto snap = load_snapshot(EPIWATCH_SAMPLE_DIR);
    CHECK(snap.warnings.empty());
    CHECK(snap.regions.contains("IN"));
    CHECK(snap.aggregated.contains("IN"));
    CHECK(snap.aggregated.contains("IN-KL"));
    CHECK(snap.find_population("IN-KL") != nullptr);
}
