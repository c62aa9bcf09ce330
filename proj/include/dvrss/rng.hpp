#pragma once

#include <cstdint>

namespace dvrss {

// splitmix64. Hand-rolled so that seeded streams are identical on every
// platform and standard library (std::uniform_int_distribution is not).
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next()
    {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n); n = 0 yields 0
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }

    // uniform in [lo, hi], inclusive
    long long range(long long lo, long long hi)
    {
        return lo + static_cast<long long>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool chance(uint32_t num, uint32_t den) { return below(den) < num; }
};

}  // namespace dvrss
