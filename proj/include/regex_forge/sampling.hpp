#ifndef REGEX_FORGE_SAMPLING_HPP
#define REGEX_FORGE_SAMPLING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "regex_forge/stats.hpp"
#include "regex_forge/task.hpp"

namespace regex_forge {

class SamplingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two-sided z value for a confidence level, e.g. 0.95 -> 1.95996.
inline double z_for_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw SamplingError("confidence must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

/// Cochran's sample size. n0 = z^2 p (1-p) / e^2 is rounded up before the
/// finite population correction n0 / (1 + (n0 - 1) / N); the result is
/// rounded up and capped at N. An absent population means N -> infinity.
inline std::size_t cochran_sample_size(std::optional<std::size_t> population, double z, double p, double e) {
    if (!(e > 0.0 && e < 1.0)) throw SamplingError("margin must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw SamplingError("proportion must lie in (0, 1)");
    if (!(z > 0.0)) throw SamplingError("z must be positive");
    if (population && *population < 1) throw SamplingError("population must be at least 1");
    const double n0 = std::ceil(z * z * p * (1.0 - p) / (e * e) - 1e-9);
    if (!population) return static_cast<std::size_t>(n0);
    const double big_n = static_cast<double>(*population);
    const double n = n0 / (1.0 + (n0 - 1.0) / big_n);
    return std::min(*population, static_cast<std::size_t>(std::ceil(n - 1e-9)));
}

inline constexpr std::size_t kStratumCount = 32;

struct StratumKey {
    TaskSource source = TaskSource::Oss;
    int test_count_quartile = 0;      // 0..3
    int positive_ratio_quartile = 0;  // 0..3

    std::size_t index() const {
        return static_cast<std::size_t>(source) * 16 + static_cast<std::size_t>(test_count_quartile) * 4 +
               static_cast<std::size_t>(positive_ratio_quartile);
    }
    static StratumKey from_index(std::size_t i) {
        return {static_cast<TaskSource>(i / 16), static_cast<int>((i / 4) % 4), static_cast<int>(i % 4)};
    }
    bool operator==(const StratumKey&) const = default;
};

/// P25, P50 and P75 cut points.
inline std::array<double, 3> quartile_bounds(const std::vector<double>& values) {
    if (values.empty()) throw SamplingError("quartiles of an empty sample");
    return {*percentile(values, 25), *percentile(values, 50), *percentile(values, 75)};
}

/// Right-closed quartile intervals: a value equal to a cut point belongs to
/// the lower quartile.
inline int quartile_of(double v, const std::array<double, 3>& bounds) {
    for (int q = 0; q < 3; ++q) {
        if (v <= bounds[static_cast<std::size_t>(q)]) return q;
    }
    return 3;
}

struct Stratification {
    std::array<double, 3> test_count_bounds{};
    std::array<double, 3> positive_ratio_bounds{};
    std::vector<StratumKey> keys;                               // per task
    std::array<std::vector<std::size_t>, kStratumCount> members;  // task indices per stratum
    std::array<double, kStratumCount> sigma{};                  // test-count standard deviation
};

inline Stratification stratify(const std::vector<CompositionTask>& tasks) {
    Stratification s;
    std::vector<double> tc, pr;
    for (const auto& t : tasks) {
        tc.push_back(static_cast<double>(t.test_count()));
        pr.push_back(t.positive_ratio());
    }
    s.test_count_bounds = quartile_bounds(tc);
    s.positive_ratio_bounds = quartile_bounds(pr);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const StratumKey key{tasks[i].source, quartile_of(tc[i], s.test_count_bounds),
                             quartile_of(pr[i], s.positive_ratio_bounds)};
        s.keys.push_back(key);
        s.members[key.index()].push_back(i);
    }
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        std::vector<double> v;
        for (std::size_t i : s.members[h]) v.push_back(tc[i]);
        s.sigma[h] = population_stddev(v);
    }
    return s;
}

/// Splits n over strata proportionally to sizes[h] * sigma[h] (Neyman), or
/// to sizes[h] alone when every weight is zero. Shares are rounded by largest
/// remainder (ties to the lower stratum index) so they sum to n, and capped
/// at caps[h] with the excess redistributed among the remaining strata.
inline std::vector<std::size_t> neyman_allocation(const std::vector<std::size_t>& sizes, const std::vector<double>& sigma,
                                                  std::size_t n, std::optional<std::vector<std::size_t>> caps = std::nullopt) {
    const std::size_t k = sizes.size();
    if (sigma.size() != k) throw SamplingError("sizes and sigma differ in length");
    const std::vector<std::size_t> cap = caps ? *caps : sizes;
    if (cap.size() != k) throw SamplingError("caps and sizes differ in length");
    if (n > std::accumulate(cap.begin(), cap.end(), std::size_t{0})) {
        throw SamplingError("sample size exceeds the available population");
    }
    std::vector<double> weight(k);
    for (std::size_t h = 0; h < k; ++h) weight[h] = static_cast<double>(sizes[h]) * sigma[h];

    std::vector<std::size_t> out(k, 0);
    std::vector<bool> fixed(k, false);
    for (std::size_t h = 0; h < k; ++h) fixed[h] = cap[h] == 0;
    std::size_t remaining = n;
    while (remaining > 0) {
        double total = 0.0;
        for (std::size_t h = 0; h < k; ++h) total += fixed[h] ? 0.0 : weight[h];
        std::vector<double> w(k, 0.0);
        for (std::size_t h = 0; h < k; ++h) {
            if (!fixed[h]) w[h] = total > 0.0 ? weight[h] : static_cast<double>(sizes[h]);
        }
        const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
        if (wsum <= 0.0) throw SamplingError("no stratum can take the remaining sample");
        std::vector<double> quota(k, 0.0);
        bool capped = false;
        for (std::size_t h = 0; h < k; ++h) {
            if (fixed[h]) continue;
            quota[h] = static_cast<double>(remaining) * w[h] / wsum;
            if (quota[h] >= static_cast<double>(cap[h])) {
                out[h] = cap[h];
                fixed[h] = true;
                capped = true;
            }
        }
        if (capped) {
            remaining = n;
            for (std::size_t h = 0; h < k; ++h) remaining -= fixed[h] ? out[h] : 0;
            continue;
        }
        std::size_t given = 0;
        std::vector<std::size_t> order;
        for (std::size_t h = 0; h < k; ++h) {
            if (fixed[h]) continue;
            out[h] = static_cast<std::size_t>(std::floor(quota[h]));
            given += out[h];
            order.push_back(h);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
        });
        for (std::size_t i = 0; given < remaining && i < order.size(); ++i, ++given) ++out[order[i]];
        remaining = 0;
    }
    return out;
}

struct Allocation {
    std::array<std::size_t, kStratumCount> evaluation{};
    std::array<std::size_t, kStratumCount> ablation{};
};

inline Allocation stratify_and_allocate(const Stratification& s, std::size_t evaluation, std::size_t ablation = 0) {
    std::vector<std::size_t> sizes(kStratumCount);
    std::vector<double> sigma(s.sigma.begin(), s.sigma.end());
    for (std::size_t h = 0; h < kStratumCount; ++h) sizes[h] = s.members[h].size();
    Allocation a;
    const auto eval = neyman_allocation(sizes, sigma, evaluation);
    std::vector<std::size_t> left(kStratumCount);
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        a.evaluation[h] = eval[h];
        left[h] = sizes[h] - eval[h];
    }
    if (ablation > 0) {
        const auto abl = neyman_allocation(sizes, sigma, ablation, left);
        std::copy(abl.begin(), abl.end(), a.ablation.begin());
    }
    return a;
}

namespace detail {

// Unbiased draw in [0, n) by rejection; unlike the standard distributions its
// output is fixed across library implementations.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace detail

struct SampleSets {
    std::vector<std::size_t> evaluation;  // task indices, ascending
    std::vector<std::size_t> ablation;
};

/// Per stratum, a seeded Fisher-Yates shuffle of its members; the first
/// evaluation[h] go to the evaluation set and the next ablation[h] to the
/// ablation set, so the sets are disjoint.
inline SampleSets draw_samples(const Stratification& s, const Allocation& a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SampleSets out;
    for (std::size_t h = 0; h < kStratumCount; ++h) {
        std::vector<std::size_t> pool = s.members[h];
        if (a.evaluation[h] + a.ablation[h] > pool.size()) throw SamplingError("allocation exceeds stratum size");
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[detail::bounded(rng, i)]);
        out.evaluation.insert(out.evaluation.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(a.evaluation[h]));
        out.ablation.insert(out.ablation.end(), pool.begin() + static_cast<std::ptrdiff_t>(a.evaluation[h]),
                            pool.begin() + static_cast<std::ptrdiff_t>(a.evaluation[h] + a.ablation[h]));
    }
    std::sort(out.evaluation.begin(), out.evaluation.end());
    std::sort(out.ablation.begin(), out.ablation.end());
    return out;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_SAMPLING_HPP
