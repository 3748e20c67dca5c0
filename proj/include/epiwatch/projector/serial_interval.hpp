#pragma once

#include "epiwatch/core/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace epiwatch::projector {

/// Discretized infector-to-infectee delay: mass[s-1] is the probability of a
/// delay of s days, s = 1..support().
struct SerialInterval {
    std::vector<double> mass;
    double mean_days = 0.0;
    double sd_days = 0.0;
    double shape = std::numeric_limits<double>::quiet_NaN();
    double scale = std::numeric_limits<double>::quiet_NaN();

    std::size_t support() const noexcept { return mass.size(); }

    /// w_s for s >= 1; zero outside the support.
    double weight(std::size_t lag) const noexcept {
        return lag >= 1 && lag <= mass.size() ? mass[lag - 1] : 0.0;
    }

    /// Observed mass F(m) = sum of w_s for s <= m.
    double cumulative(std::size_t max_lag) const noexcept {
        const auto n = std::min(max_lag, mass.size());
        return std::accumulate(mass.begin(), mass.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    }

    /// Builds from an explicit mass vector; mean and sd are computed from it.
    static SerialInterval from_mass(std::vector<double> mass) {
        SerialInterval si;
        si.mass = std::move(mass);
        validate(si);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t s = 1; s <= si.mass.size(); ++s) {
            m1 += static_cast<double>(s) * si.mass[s - 1];
            m2 += static_cast<double>(s * s) * si.mass[s - 1];
        }
        si.mean_days = m1;
        si.sd_days = std::sqrt(std::max(0.0, m2 - m1 * m1));
        return si;
    }

    /// Throws InvalidSerialInterval unless the mass is non-empty,
    /// non-negative and sums to 1 within 1e-9.
    static void validate(const SerialInterval& si) {
        if (si.mass.empty()) {
            throw Error(Errc::InvalidSerialInterval, "serial interval has no support");
        }
        double total = 0.0;
        for (double w : si.mass) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw Error(Errc::InvalidSerialInterval, "serial interval mass must be finite and non-negative");
            }
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw Error(Errc::InvalidSerialInterval, "serial interval mass sums to " + std::to_string(total));
        }
    }
};

inline constexpr double kDefaultSiShape = 2.15;
inline constexpr double kDefaultSiScale = 2.04;
inline constexpr double kSiCoverage = 0.999;

/// Gamma(shape, scale) discretized to whole days: w_s = F(s+0.5) - F(s-0.5)
/// with w_1 = F(1.5). The support stops at the first S with F(S+0.5) >=
/// coverage and the mass is renormalized over it.
inline SerialInterval discretize_serial_interval(double shape, double scale, double coverage = kSiCoverage) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
        throw Error(Errc::InvalidParameter, "gamma shape and scale must be positive");
    }
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw Error(Errc::InvalidParameter, "coverage must lie in (0, 1)");
    }
    auto cdf = [&](double x) { return boost::math::gamma_p(shape, x / scale); };

    std::vector<double> mass{cdf(1.5)};
    double upper = cdf(1.5);
    for (std::size_t s = 2; upper < coverage; ++s) {
        const double next = cdf(static_cast<double>(s) + 0.5);
        mass.push_back(next - upper);
        upper = next;
        if (s > 100000) {
            throw Error(Errc::InvalidParameter, "serial interval support does not converge");
        }
    }
    for (double& w : mass) w /= upper;

    auto si = SerialInterval::from_mass(std::move(mass));
    si.shape = shape;
    si.scale = scale;
    return si;
}

inline SerialInterval default_serial_interval() { return discretize_serial_interval(kDefaultSiShape, kDefaultSiScale); }

}  // namespace epiwatch::projector
