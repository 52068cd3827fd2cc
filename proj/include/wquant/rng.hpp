#ifndef WQUANT_RNG_HPP
#define WQUANT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace wquant {

// Deterministic random streams. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); the value mappings below are written
// out by hand because the std::*_distribution adapters are implementation
// defined and would break bit-for-bit reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), eng_(mix(seed, stream)) {}

    // Derive an independent stream from the same base seed; used to give
    // every task in a parallel sweep its own generator so results do not
    // depend on scheduling order.
    Rng child(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t lim = UINT64_MAX - UINT64_MAX % n; // rejection: no modulo bias
        std::uint64_t v;
        do { v = eng_(); } while (v >= lim);
        return v % n;
    }

    // Standard normal via Box-Muller (no cached spare, fully deterministic).
    double normal() {
        double u1, u2;
        do { u1 = uniform(); } while (u1 <= 0.0);
        u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed;
        std::uint64_t a = splitmix(x);
        x ^= stream * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
        std::uint64_t b = splitmix(x);
        return a ^ (b + 0x165667b19e3779f9ULL);
    }

    std::uint64_t seed_ = 0;
    std::mt19937_64 eng_;
};

} // namespace wquant

#endif
