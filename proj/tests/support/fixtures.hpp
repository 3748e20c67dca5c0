#pragma once

#include "epiwatch/epiwatch.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("epiwatch-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

/// Two-state, one-district dataset: IN <- {IN-AA, IN-BB}, IN-AA <- {IN-AA-XX}.
/// Only the district and IN-BB are reported; IN-AA and IN are synthesized.
struct SmallDataset {
    std::string registry =
        "region_code,name,level,parent_code\n"
        "IN,India,nation,\n"
        "IN-AA,Alpha Pradesh,state,IN\n"
        "IN-AA-XX,Xenon,district,IN-AA\n"
        "IN-BB,Beta Nadu,state,IN\n"
        "IN-CC,Gamma Empty,state,IN\n";
    std::string population =
        "region_code,name,population\n"
        "IN,India,1000000000\n"
        "IN-AA,Alpha Pradesh,50000000\n"
        "IN-AA-XX,Xenon,2000000\n"
        "IN-BB,Beta Nadu,70000000\n";
    std::string aliases =
        "alias,region_code\n"
        "Alfa,IN-AA\n";
    std::string daily;

    explicit SmallDataset(std::size_t days = 120, epiwatch::Date start = epiwatch::Date::from_ymd(2020, 3, 1)) {
        daily = "date,region_code,confirmed,recovered,deceased,tested\n";
        for (std::size_t t = 0; t < days; ++t) {
            const auto d = (start + static_cast<std::int64_t>(t)).iso();
            const auto x = static_cast<long long>(20 + 300 * std::exp(-std::pow((double(t) - 40.0) / 12.0, 2)) +
                                                  450 * std::exp(-std::pow((double(t) - 95.0) / 10.0, 2)));
            const auto y = static_cast<long long>(10 + t % 7);
            daily += d + ",IN-AA-XX," + std::to_string(x) + "," + std::to_string(x / 2) + "," + std::to_string(x / 50) +
                     "," + std::to_string(10 * x + 100) + "\n";
            daily += d + ",IN-BB," + std::to_string(y) + ",0,0,\n";
        }
    }

    void write(const fs::path& dir) const {
        write_text(dir / "region_registry.csv", registry);
        write_text(dir / "population.csv", population);
        write_text(dir / "aliases.csv", aliases);
        write_text(dir / "daily_cases.csv", daily);
    }
};

/// Poisson noise around the sum of two Gaussian bumps plus a floor.
inline std::vector<epiwatch::Count> two_gaussian_curve(std::size_t days, double a1, double p1, double s1, double a2,
                                                       double p2, double s2, double floor, std::uint64_t seed) {
    epiwatch::SplitMix64 rng(seed);
    std::vector<epiwatch::Count> out;
    for (std::size_t t = 0; t < days; ++t) {
        const double x = static_cast<double>(t);
        const double lam = a1 * std::exp(-0.5 * std::pow((x - p1) / s1, 2)) +
                           a2 * std::exp(-0.5 * std::pow((x - p2) / s2, 2)) + floor;
        out.push_back(epiwatch::sample_poisson(lam, rng));
    }
    return out;
}

inline std::vector<double> two_gaussian_mean(std::size_t days, double a1, double p1, double s1, double a2, double p2,
                                             double s2, double floor) {
    std::vector<double> out;
    for (std::size_t t = 0; t < days; ++t) {
        const double x = static_cast<double>(t);
        out.push_back(a1 * std::exp(-0.5 * std::pow((x - p1) / s1, 2)) +
                      a2 * std::exp(-0.5 * std::pow((x - p2) / s2, 2)) + floor);
    }
    return out;
}

}  // namespace fixtures
