#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ksf {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it also plugs
/// into <random>, but the library only draws through uniform01/standard_normal
/// below to keep streams identical across standard library implementations.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

/// Independent stream for (seed, a, b), e.g. (seed, triad, chunk). Each key is
/// folded in through a full mix so neighbouring keys give unrelated states.
inline constexpr SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t s = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL);
    s = splitmix64_mix(s ^ (a + 0xD1B54A32D192ED03ULL));
    s = splitmix64_mix(s ^ (b + 0x8CB92BA72F3D8DD7ULL));
    return SplitMix64(s);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform01(Gen& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes exactly two draws per call.
template <class Gen>
double standard_normal(Gen& gen) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ksf
