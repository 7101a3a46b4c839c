#pragma once

// Portable pseudo-random source. Every draw is defined bit-for-bit here so
// the same seed yields the same data in any implementation; std::
// distributions are avoided because their output is library-specific.
//
//   splitmix64:   x += 0x9E3779B97F4A7C15
//                 z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                 return z ^ (z >> 31)
//   xoshiro256**: result = rotl(s1 * 5, 7) * 9
//                 t = s1 << 17
//                 s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//
// xoshiro256** state is filled with four consecutive splitmix64 outputs.

#include <cstdint>
#include <limits>
#include <span>

namespace pdm {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a master seed and a stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n) by rejection (unbiased). n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

private:
    std::uint64_t s_[4];
};

/// Fisher-Yates shuffle driven by Xoshiro256::below, walking i = n-1 .. 1.
template <typename T>
void shuffle(std::span<T> items, Xoshiro256& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace pdm
