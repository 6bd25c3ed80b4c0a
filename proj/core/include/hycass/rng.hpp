#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hycass {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Stable per-stream seed derivation so independent consumers (per-cube,
/// per-step, per-tensor) never share or shift each other's streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x51ed270b1a2f9d3bull));
}

/// mt19937_64 with hand-rolled distributions. std:: distributions are
/// implementation-defined; these keep byte-identical outputs across stdlibs.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased via rejection.
    int uniform_int(int n) {
        uint64_t un = uint64_t(n);
        uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return int(v % un);
    }

    /// Standard normal, Box-Muller with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Normal(0, sigma) truncated to [-bound, bound] by rejection.
    double trunc_normal(double sigma, double bound) {
        double v;
        do {
            v = normal() * sigma;
        } while (v < -bound || v > bound);
        return v;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hycass
