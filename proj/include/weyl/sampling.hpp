#pragma once

#include <span>
#include <vector>

#include "weyl/chart.hpp"

namespace weyl {

/// Radical-inverse (van der Corput) value of index in the given base.
inline double radical_inverse(unsigned long long index, unsigned base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (index) {
        x += (index % base) * f;
        index /= base;
        f *= inv;
    }
    return x;
}

/**
 * Seeded Halton points in the chart's domain box. The seed offsets the
 * sequence start (index = seed + k + 1), which keeps runs deterministic and
 * well-spread without any RNG portability concerns.
 */
inline std::vector<std::vector<double>> sample_points(const MetricChart& chart, int count,
                                                      unsigned long long seed) {
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        std::vector<double> x(static_cast<std::size_t>(chart.n));
        for (int i = 0; i < chart.n; ++i) {
            const double u = radical_inverse(seed + static_cast<unsigned long long>(k) + 1,
                                             primes[static_cast<std::size_t>(i)]);
            const auto& iv = chart.domain[static_cast<std::size_t>(i)];
            // shrink slightly into the interior so finite-difference stencils stay in-domain
            const double lo = iv[0] + 0.02 * (iv[1] - iv[0]);
            const double hi = iv[1] - 0.02 * (iv[1] - iv[0]);
            x[static_cast<std::size_t>(i)] = lo + u * (hi - lo);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

} // namespace weyl
