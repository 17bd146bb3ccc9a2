#pragma once

#include <cmath>
#include <cstdint>

namespace socsim {

// Deterministic random stream (splitmix64 core). Distributions are
// implemented by hand so that runs are bit-reproducible across standard
// library implementations. Streams derived via split() depend only on the
// root seed and the stream id, never on how much the parent has consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0.
    std::int64_t uniform_int(std::int64_t n) {
        return static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(n));
    }

    // Box-Muller. Uses two uniforms per variate; no cached spare so the
    // consumption pattern stays obvious.
    double normal(double mean, double stddev) {
        if (stddev == 0.0) return mean;
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925287 * u2);
    }

    // Exponential with the given mean.
    double exponential(double mean) {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return -mean * std::log(u);
    }

    // Counter-based derivation: child stream depends only on (seed, stream).
    Rng split(std::uint64_t stream) const {
        std::uint64_t z = seed_ ^ (0x9E3779B97F4A7C15ull + stream * 0xD1B54A32D192ED03ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace socsim
