#pragma once

#include <array>
#include <cstdint>

namespace sdttrp {

// Portable deterministic RNG used everywhere randomness is needed.
// Algorithms: splitmix64 (Vigna) for seeding / stream derivation and
// xoshiro256** (Blackman & Vigna) as the generator. Both are pinned by
// reference vectors in the test suite so traces are reproducible across
// platforms and implementations.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// splitmix64 output function alone (no counter increment).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed for the k-th derived stream of a base seed. Used to give each
// greedy route, the tabu loop and the generator independent streams.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ull);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    // Uniform in [0,n). Plain modulo; the bias is negligible for the
    // desk-scale n used here and keeps the mapping trivially portable.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace sdttrp
