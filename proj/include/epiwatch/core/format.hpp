#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace epiwatch {

/// Rounds to 6 fractional digits; used for every serialized real so golden
/// files are stable.
inline double round6(double x) {
    if (!std::isfinite(x)) return x;
    const double r = std::round(x * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;
}

/// Shortest decimal form of round6(x); empty for non-finite values.
inline std::string format_real(double x) {
    if (!std::isfinite(x)) return {};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, round6(x));
    if (ec != std::errc{}) return {};
    return std::string(buf, ptr);
}

}  // namespace epiwatch
