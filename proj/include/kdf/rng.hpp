#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace kdf {

// SplitMix64 finalizer; the output stream is a pure function of (key, counter),
// so draw k is reproducible without replaying draws 0..k-1.
inline uint64_t splitmix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Hash-combines a seed with sub-stream labels (id index, instance number, ...).
inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> parts) {
    uint64_t h = splitmix64(seed);
    for (uint64_t p : parts) h = splitmix64(h ^ (0x9E3779B97F4A7C15ull + splitmix64(p)));
    return h;
}

/// Counter-based uniform stream. Platform-independent: no std distributions.
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    std::complex<double> unit_phase() {
        const double th = uniform(0.0, 6.283185307179586);
        return {std::cos(th), std::sin(th)};
    }

private:
    uint64_t key_;
    uint64_t ctr_ = 0;
};

} // namespace kdf
