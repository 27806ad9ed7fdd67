#pragma once

#include <cstdint>

namespace lexf {

/// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(mix64(a) ^ b);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return mix64(mix64(mix64(a) ^ b) ^ c);
}

/// Map 64 random bits to a double in the open interval (0,1).
constexpr double u01(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Per-try per-coordinate uniform, the stateless hash_t(i) of the algorithm.
inline double try_uniform(std::uint64_t master_seed, std::uint64_t t, std::uint64_t i) noexcept {
    return u01(mix64(master_seed, t, i));
}

/// Tiny counter-based generator for reproducible instance synthesis.
/// Satisfies UniformRandomBitGenerator; one independent stream per key.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_u01() noexcept { return u01((*this)()); }

    /// Uniform integer in [0, n) via the multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace lexf
