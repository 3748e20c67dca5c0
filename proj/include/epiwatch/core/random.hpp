#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace epiwatch {

/// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: output k depends only
/// on (seed, k), so sub-streams keyed by an index are cheap and independent of
/// evaluation order.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Generator for sub-stream `index` of `seed`.
    static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(seed ^ mix(index * kGamma + 0x2545F4914F6CDD1DULL)));
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t state_;
};

/// Poisson draw that treats a non-positive mean as a point mass at zero.
template <class Engine>
std::int64_t sample_poisson(double mean, Engine& engine) {
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(engine);
}

}  // namespace epiwatch
