#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qmegs {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive mix of two 64-bit values; used to derive RNG stream seeds.
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seedable pseudo-random generator with fully specified output.
///
/// Wraps std::mt19937_64 (bit-exact per the standard) and derives doubles
/// with fixed arithmetic, so identical seeds give identical draws on every
/// platform. Worker streams are derived as Rng::stream(master, index); the
/// derivation is a hash, so streams for distinct indices are independent
/// for practical purposes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_index) {
        return Rng(hash_combine(master_seed, stream_index));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard Box-Muller; consumes exactly two uniforms per call.
    double normal(double mean, double stddev) {
        double u1 = uniform();
        double u2 = uniform();
        // shift u1 away from 0 so log stays finite
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// +1 with probability p (clamped to [0,1]), else -1.
    int sign_with_prob(double p) {
        if (p <= 0.0) return -1;
        if (p >= 1.0) return +1;
        return uniform() < p ? +1 : -1;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace qmegs
