#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace epiwarn {

/// Counter-based generator: each output is a keyed hash of a 64-bit counter.
/// Streams are addressed by (seed, stream id), so replicate i always sees the
/// same numbers no matter which thread or in which order it is generated.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + stream * 0x9e3779b97f4a7c15ULL)) {}

    /// Independent child stream; the parent is not advanced.
    CounterRng split(std::uint64_t stream) const noexcept {
        CounterRng child(0);
        child.key_ = mix(key_ ^ mix(stream + 0xbb67ae8584caa73bULL));
        return child;
    }

    std::uint64_t next_u64() noexcept { return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer on [lo, hi] inclusive (unbiased, rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
        if (span == 0) return static_cast<std::int64_t>(next_u64());
        const std::uint64_t threshold = (0ULL - span) % span;
        std::uint64_t x = next_u64();
        while (x < threshold) x = next_u64();
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Pair of independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() noexcept {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    double normal() noexcept { return normal_pair().first; }

    /// Triangular(min, mode, max) by inverse CDF; degenerate when min == max.
    double triangular(double lo, double mode, double hi) noexcept {
        if (hi <= lo) return lo;
        const double u = uniform();
        const double cut = (mode - lo) / (hi - lo);
        if (u < cut) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
        return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by a CounterRng.
template <typename It>
void shuffle(It first, It last, CounterRng& rng) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
        const auto j = rng.uniform_int(0, i);
        std::swap(first[i], first[j]);
    }
}

}  // namespace epiwarn
