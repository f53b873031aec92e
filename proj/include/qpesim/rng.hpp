#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace qpesim {

/// Seeded random source used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The uniform and gaussian mappings are written out explicitly
/// because the std::*_distribution algorithms are implementation-defined,
/// which would break seed reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 uniform bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace detail

/// Derive an independent stream seed for a labelled point of a sweep, so
/// points can run in any order (or in parallel) with identical results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = detail::splitmix64(base ^ 0x6a09e667f3bcc909ull);
    s = detail::splitmix64(s ^ a);
    return detail::splitmix64(s ^ (b * 0x9e3779b97f4a7c15ull + 1));
}

/// Multinomial draw: `shots` independent picks from `probabilities`
/// (assumed nonnegative, summing to ~1), counted per bin.
inline std::vector<std::int64_t> multinomial_sample(const std::vector<double>& probabilities,
                                                    std::int64_t shots, Rng& rng) {
    if (shots < 0) throw std::invalid_argument("multinomial_sample: shots must be >= 0");
    std::vector<double> cumulative(probabilities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cumulative[i] = acc;
    }
    // guard the tail against rounding so u < acc always lands in range
    cumulative.back() = std::max(cumulative.back(), 1.0);

    std::vector<std::int64_t> counts(probabilities.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        ++counts[idx < counts.size() ? idx : counts.size() - 1];
    }
    return counts;
}

} // namespace qpesim
