#pragma once

#include <cstdint>
#include <random>

namespace cusp {

// SplitMix64 finalizer. Used to decorrelate user seeds before they reach the
// Mersenne Twister and to derive per-trial seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trial `index` in a run with base seed `base`. Serial and parallel
/// runs use the same function, so trial i always sees the same stream.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base) ^ (index * 0xd1342543de82ef95ULL + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }

    // 53-bit uniform in [0,1); defined on raw engine output so results do not
    // depend on the standard library's distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in (0,1).
    double uniform_open() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace cusp
