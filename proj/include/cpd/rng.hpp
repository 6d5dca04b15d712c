#pragma once

#include <cmath>
#include <cstdint>

namespace cpd {

/// SplitMix64 finalizer. Bijective mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from (seed, salt). Used to give every
/// (trial, channel) pair its own reproducible stream, so Monte Carlo workers
/// can run in any order and still produce identical output.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt ^ 0xA3C59AC2ULL));
}

/// Per-trial seed stream shared by the Monte Carlo drivers: trial i of a run
/// seeded with `seed` always sees the same draws, whatever the worker layout.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return derive_stream(seed, 0x7C4A7C15ULL + trial);
}

/// Counter-based generator: the n-th output is a pure function of (key, n),
/// so streams never share state and replay is exact.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    CounterRng(std::uint64_t seed, std::uint64_t salt) : key_(derive_stream(seed, salt)) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform in (0, 1); never returns exactly 0 or 1.
    double next_uniform() {
        const std::uint64_t bits = next_u64() >> 11; // top 53 bits
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cpd
