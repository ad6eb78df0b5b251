#pragma once

#include <cstdint>
#include <string_view>

namespace qmine {

// 64-bit FNV-1a. Used everywhere a stable, platform-independent content
// hash is needed (external ids, shingles, feature buckets, config hashes).
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr uint64_t fnv1a64(std::string_view data, uint64_t state = kFnvOffset) {
    for (unsigned char c : data) {
        state ^= c;
        state *= kFnvPrime;
    }
    return state;
}

constexpr uint64_t fnv1a64_byte(uint8_t byte, uint64_t state) {
    state ^= byte;
    state *= kFnvPrime;
    return state;
}

constexpr uint64_t fnv1a64_u64(uint64_t value, uint64_t state = kFnvOffset) {
    for (int i = 0; i < 8; ++i) {
        state = fnv1a64_byte(static_cast<uint8_t>(value >> (i * 8)), state);
    }
    return state;
}

// splitmix64 step; the standard finalizer also doubles as a mixer.
constexpr uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG with identical output on every platform. std::mt19937_64
// would do, but std::uniform_*_distribution is implementation-defined, so we
// keep the whole chain hand-rolled.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, n). Modulo bias is < n / 2^64, irrelevant at our sizes.
    uint64_t next_below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    uint64_t state_;
};

}  // namespace qmine
