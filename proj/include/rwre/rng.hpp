#pragma once
#include <cstdint>

namespace rwre {

// SplitMix64 finalizer. Used both as the stateless site hash of the
// environment (mix64(seed ^ x)) and as the mixing step of the sequential
// walk streams, so every random quantity in the project is reproducible
// from 64-bit seeds alone.
inline constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sequential stream: state advances by the golden-ratio increment, output
// is the finalizer. One draw per walk step.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_unit() { return to_unit(next()); }

    // 53-bit mantissa in [0,1)
    static double to_unit(uint64_t bits) {
        return (bits >> 11) * 0x1.0p-53;
    }

private:
    uint64_t state_;
};

// Disjoint derived seeds for replica / environment fan-out. Two distinct
// (master, index) pairs collide only if mix64 collides, so sequential
// indices give uncorrelated streams.
inline constexpr uint64_t derive_seed(uint64_t master, uint64_t index) {
    return mix64(master ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

} // namespace rwre
