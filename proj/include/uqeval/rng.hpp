#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "uqeval/core.hpp"
#include "uqeval/normal.hpp"

namespace uqeval {

/// Deterministic random stream used by every synthetic generator.
///
/// xoshiro256++ (Blackman & Vigna), state seeded from the 64-bit seed
/// with splitmix64. Both algorithms are fixed and documented so a seed
/// identifies one byte-exact stream everywhere.
/// https://prng.di.unimi.it/
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on the open interval (0,1); safe to feed into quantiles.
    double next_open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_unit() < p; }

    /// Standard normal via the inverse-CDF transform.
    double next_normal() { return normal_quantile(next_open_unit()); }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) raise(errc::bad_params, "next_below: bound must be positive");
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % bound;
    }

    /// Gamma(shape, 1) via Marsaglia & Tsang; shapes below 1 are boosted
    /// and corrected with the standard power-of-uniform step.
    double next_gamma(double shape) {
        if (!(shape > 0.0)) raise(errc::bad_params, "next_gamma: shape must be positive");
        if (shape < 1.0)
            return next_gamma(shape + 1.0) * std::pow(next_open_unit(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double sc = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + sc * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_open_unit();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double next_beta(double a, double b) {
        const double ga = next_gamma(a);
        const double gb = next_gamma(b);
        return ga / (ga + gb);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace uqeval
