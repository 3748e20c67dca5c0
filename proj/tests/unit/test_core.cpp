#include "epiwatch/epiwatch.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace epiwatch;
using Catch::Matchers::WithinAbs;

TEST_CASE("dates parse, print and count days", "[core]") {
    const auto d = Date::parse("2020-09-19");
    CHECK(d.iso() == "2020-09-19");
    CHECK(Date::parse("2021-02-13") - d == 147);
    CHECK((d + 1).iso() == "2020-09-20");
    CHECK(Date::parse("2020-02-28") + 1 == Date::parse("2020-02-29"));
    CHECK(Date::parse("2021-02-28") + 1 == Date::parse("2021-03-01"));
    CHECK(Date::from_ymd(2020, 1, 1) < Date::from_ymd(2020, 1, 2));
    for (const char* bad : {"2020-9-19", "2020-02-30", "19-09-2020", "2020-09-19x", "", "2021-02-29"}) {
        CHECK_THROWS_AS(Date::parse(bad), Error);
    }
}

TEST_CASE("round6 and format_real follow the wire rules", "[core]") {
    CHECK(round6(0.1234564) == 0.123456);
    CHECK(round6(-2.5) == -2.5);
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(3.0) == "3");
    CHECK(format_real(std::nan("")).empty());
    CHECK(format_real(std::numeric_limits<double>::infinity()).empty());
}

TEST_CASE("SplitMix64 is deterministic and substreams differ", "[core]") {
    SplitMix64 a(7), b(7);
    for (int i = 0; i < 100; ++i) REQUIRE(a() == b());
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(SplitMix64::substream(42, i)());
    CHECK(firsts.size() == 1000);
    auto s = SplitMix64::substream(42, 3);
    auto t = SplitMix64::substream(42, 3);
    CHECK(s() == t());
}

TEST_CASE("sample_poisson has the right mean and maps non-positive means to zero", "[core]") {
    SplitMix64 rng(11);
    CHECK(sample_poisson(0.0, rng) == 0);
    CHECK(sample_poisson(-3.0, rng) == 0);
    double sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_poisson(4.0, rng));
    CHECK_THAT(sum / n, WithinAbs(4.0, 3 * std::sqrt(4.0 / n)));
}

TEST_CASE("moving_average examples and edges", "[core]") {
    const std::vector<Count> x{1, 2, 3, 4, 5, 6, 7};
    const auto m = moving_average(x, 3);
    CHECK(m == std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0});
    CHECK(moving_average(x, 1) == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
    CHECK_THROWS_MATCHES(moving_average(std::vector<Count>{}, 3), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::EmptyInput; }));
    CHECK_THROWS_AS(moving_average(x, 0), Error);
}

TEST_CASE("moving_average matches windowed sums on random series", "[core]") {
    SplitMix64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng() % 80;
        const std::size_t w = 1 + rng() % 20;
        std::vector<Count> x(n);
        for (auto& v : x) v = static_cast<Count>(rng() % 100000);
        const auto got = moving_average(x, w);
        const auto want = oracle::trailing_mean(x, w);
        for (std::size_t t = 0; t < n; ++t) REQUIRE_THAT(got[t], WithinAbs(want[t], 1e-9 * (1 + want[t])));
    }
}

TEST_CASE("cumulative and day_differences are inverse", "[core]") {
    SplitMix64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Count> x(1 + rng() % 50);
        for (auto& v : x) v = static_cast<Count>(rng() % 1000);
        const auto c = cumulative(x);
        CHECK(c == oracle::prefix_sum(x));
        CHECK(day_differences(c) == x);
    }
    CHECK_THROWS_AS(cumulative(std::vector<Count>{}), Error);
}

TEST_CASE("align_and_clip intersects ranges", "[core]") {
    IncidenceSeries s;
    s.region = {"IN", "India", Level::nation, std::nullopt};
    s.start = Date::parse("2020-03-01");
    s.confirmed = {1, 2, 3, 4, 5};
    s.recovered = {0, 0, 1, 1, 1};
    s.deceased = {0, 0, 0, 0, 1};
    const auto c = align_and_clip(s, Date::parse("2020-02-01"), Date::parse("2020-03-03"));
    CHECK(c.start == s.start);
    CHECK(c.confirmed == std::vector<Count>{1, 2, 3});
    CHECK(c.deceased == std::vector<Count>{0, 0, 0});
    const auto d = align_and_clip(s, Date::parse("2020-03-04"), Date::parse("2020-04-01"));
    CHECK(d.confirmed == std::vector<Count>{4, 5});
    CHECK_THROWS_MATCHES(align_and_clip(s, Date::parse("2020-04-01"), Date::parse("2020-04-05")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::OutOfRange; }));
    CHECK(index_of(s, Date::parse("2020-03-05")) == 4u);
    CHECK_FALSE(index_of(s, Date::parse("2020-03-06")));
}

TEST_CASE("level and parent follow the code shape", "[core]") {
    CHECK(level_from_code("IN") == Level::nation);
    CHECK(level_from_code("IN-KL") == Level::state);
    CHECK(level_from_code("IN-KL-EKM") == Level::district);
    CHECK(parent_code_of("IN-KL-EKM") == std::optional<std::string>("IN-KL"));
    CHECK_FALSE(parent_code_of("IN"));
    CHECK(parse_level("district") == Level::district);
    CHECK_THROWS_AS(parse_level("county"), Error);
}

TEST_CASE("series validation rejects ragged and negative columns", "[core]") {
    IncidenceSeries s;
    s.region.code = "IN";
    CHECK_THROWS_AS(s.validate(), Error);
    s.confirmed = {1, 2};
    s.recovered = {0};
    s.deceased = {0, 0};
    CHECK_THROWS_AS(s.validate(), Error);
    s.recovered = {0, -1};
    CHECK_THROWS_AS(s.validate(), Error);
    s.recovered = {0, 1};
    CHECK_NOTHROW(s.validate());
}
