#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ampcon {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic random stream. mt19937_64 output is fully specified by the
/// standard, and the uniform/normal draws below avoid the
/// implementation-defined std:: distributions, so a (seed, stream) pair
/// reproduces the same sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent substream keyed by up to two counters (batch index,
    /// curve-point index, ...). Used to make parallel accumulation
    /// order-independent.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t s = seed;
        std::uint64_t k = splitmix64(s);
        s ^= a * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull;
        k ^= splitmix64(s);
        s ^= b * 0x9e6c63d0876a9f4bull + 1;
        k ^= splitmix64(s);
        return Rng(k);
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Uniform integer in [0, n). Modulo bias is < 2^-50 for the n used here.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    /// Standard normal via Box-Muller (pair cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Complex with independent N(0,1) real/imag parts.
    std::complex<double> normal_pair() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ampcon
