#ifndef REGEX_FORGE_STATS_HPP
#define REGEX_FORGE_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace regex_forge {

/// Percentile by linear interpolation between order statistics
/// (rank = p/100 * (n-1)). Absent for an empty sample.
inline std::optional<double> percentile(std::vector<double> values, double p) {
    if (values.empty()) return std::nullopt;
    if (p < 0.0 || p > 100.0) throw std::domain_error("percentile outside [0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline std::optional<double> median(const std::vector<double>& values) { return percentile(values, 50.0); }

inline std::optional<double> mean(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

/// Population variance; absent below two values.
inline std::optional<double> population_variance(const std::vector<double>& values) {
    if (values.size() < 2) return std::nullopt;
    const double m = *mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size());
}

inline double population_stddev(const std::vector<double>& values) {
    const auto v = population_variance(values);
    return v ? std::sqrt(*v) : 0.0;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_STATS_HPP
