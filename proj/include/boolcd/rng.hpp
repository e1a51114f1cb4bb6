#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace boolcd {

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
/// the standard); the uniform and gaussian transforms are implemented here
/// instead of <random> distributions, whose sequences are
/// implementation-defined. Identical seed => identical stream, everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform draw in (0, 1]; safe as a log() argument.
    double uniform01_open_left() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one value per call, no cached spare).
    double gaussian() {
        const double u1 = uniform01_open_left();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform integer in [0, n).
    int uniform_index(int n) {
        // modulo-free rejection sampling keeps the draw exactly uniform
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<int>(x % bound);
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 step; used to derive decorrelated child seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for a named sub-stream, e.g. (base, size, policy, trace index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0xD1B54A32D192ED03ULL;
    h ^= splitmix64(s);
    s ^= b * 0x8CB92BA72F3D8DD7ULL;
    h ^= splitmix64(s);
    s ^= c * 0xAEF17502108EF2D9ULL;
    h ^= splitmix64(s);
    return h;
}

}  // namespace boolcd
