#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "rbt/constants.hpp"

namespace rbt {

/// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
/// <random> distributions so that captures are bit-identical across
/// standard-library implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe to feed into log().
    double uniform01_open_low() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Circularly symmetric complex Gaussian with E[|z|^2] = sigma^2,
    /// drawn in polar form.
    std::complex<double> complex_gaussian(double sigma) {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        const double r = sigma * std::sqrt(-std::log(u1));
        return std::polar(r, 2.0 * kPi * u2);
    }

    /// Independent child stream for (seed, stream) pairs, e.g. one per frame.
    static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 g(seed ^ (0xA0761D6478BD642Full + stream * 0xE7037ED1A0B428DBull));
        g.next();
        return g.next();
    }

private:
    std::uint64_t state_;
};

} // namespace rbt
