#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pm {

// Finalizer of the splitmix64 generator. Used to spread a (master seed,
// stream index) pair into decorrelated per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x6A09E667F3BCC909ULL));
}

// Seeded random source. Every variate is built from the raw 64-bit engine
// output (never from std::*_distribution, whose streams are not pinned by the
// standard), so a seed reproduces the same sequence on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1]; never 0, so log(uniform01()) is always finite.
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (uniform01() - 0x1.0p-53) * (hi - lo);
    }

    bool bernoulli(double p) { return uniform01() <= p; }

    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    double exponential(double scale) { return -scale * std::log(uniform01()); }

    // Symmetric two-sided exponential with E[|X|] = scale.
    double laplace(double scale) {
        const double magnitude = exponential(scale);
        return (engine_() & 1u) ? magnitude : -magnitude;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pm
