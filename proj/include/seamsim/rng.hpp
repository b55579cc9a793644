#pragma once

#include <cstdint>

namespace seamsim {

// Counter-based generator (SplitMix64 finalizer over a keyed counter).
// Streams derived from (seed, stream) are independent; a given stream
// yields the same sequence regardless of which thread consumes it.
struct CounterRng {
    uint64_t key;
    uint64_t counter = 0;

    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() { return mix(key + 0x632be59bd9b4e019ULL * ++counter); }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) {
        // 128-bit multiply keeps the bias below 2^-64, irrelevant here
        return (uint64_t)(((__uint128_t)next_u64() * n) >> 64);
    }
};

} // namespace seamsim
