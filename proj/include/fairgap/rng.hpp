#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fairgap {

// Counter-based splitmix64. Used everywhere randomness must be reproducible
// across platforms and independent of evaluation order: sample i of a sweep
// draws from SplitMix64(mix(seed, i)) no matter which thread evaluates it.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (uses two uniforms, discards the pair's second)
    double normal();

    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

inline double SplitMix64::normal() {
    double u1 = uniform();
    const double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Deterministic stream-splitting: derive an independent seed from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (index * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
    return s.next();
}

}  // namespace fairgap
