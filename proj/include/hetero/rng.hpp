#ifndef HETERO_RNG_HPP
#define HETERO_RNG_HPP

#include <cmath>
#include <cstdint>

namespace hetero {

/// splitmix64 finalizer. Used both as the core generator step and to derive
/// independent per-run seeds from a master seed (mix_seed below), so that
/// parallel runs are individually reproducible regardless of execution order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive the seed for logical stream `stream` from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (stream * 0xD6E8FEB86659FD93ULL);
    return splitmix64(s);
}

/// Small deterministic PRNG. Identical seeds give identical sequences on
/// every platform (pure 64-bit integer ops, no library distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 42) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Gaussian sample via Box-Muller (no cached spare; two uniforms per draw).
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + sd * z;
    }

private:
    std::uint64_t state_;
};

} // namespace hetero

#endif // HETERO_RNG_HPP
