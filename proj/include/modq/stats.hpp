#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace modq {

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double stddev_of(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// Linear-interpolation quantile on a copy of the data, q in [0,1].
inline double quantile_of(std::span<const double> xs, double q) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double median_of(std::span<const double> xs) { return quantile_of(xs, 0.5); }

}  // namespace modq
