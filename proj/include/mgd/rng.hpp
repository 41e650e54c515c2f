#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "mgd/la.hpp"

namespace mgd {

// splitmix64 finalizer
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Seed derivation for independent streams. Every consumer derives its own
// seed from (master, structural indices...), so adding or removing work
// units never reorders the randomness of the others.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> parts) {
    uint64_t s = master;
    for (uint64_t p : parts) s = mix64(s + 0x9e3779b97f4a7c15ULL + p);
    return s;
}

// Stream tags for derive_seed so distinct uses of the same (class, traj, t)
// tuple never collide.
enum : uint64_t {
    kSeedDataset = 101,
    kSeedTestset = 102,
    kSeedInit = 103,
    kSeedPatch = 104,
    kSeedStep = 105,
    kSeedSelect = 106,
};

// mt19937_64 with portable output mappings. std::normal_distribution is
// implementation-defined, so normals come from a fixed Box-Muller transform
// instead: two engine draws per normal, bit-reproducible everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    Vec normal_vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // uniform integer in [0, n), rejection-sampled to avoid modulo bias
    uint64_t uniform_below(uint64_t n) {
        const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= bound);
        return x % n;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace mgd
