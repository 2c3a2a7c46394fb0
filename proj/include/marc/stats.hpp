#pragma once

#include <cmath>
#include <cstdint>

namespace marc::stats {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion. Unlike the normal
// approximation it stays inside [0, 1] and behaves sensibly for zero
// counts, which matters for high-SNR points with few or no errors.
inline Interval wilson(std::uint64_t successes, std::uint64_t trials,
                       double z = 1.959963984540054) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    double lo = centre - half;
    double hi = centre + half;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
    return {lo, hi};
}

}  // namespace marc::stats
