#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "rbt/fft.hpp"
#include "rbt/rng.hpp"

using Catch::Approx;
using namespace rbt;

namespace {

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = sign * 2.0 * kPi * static_cast<double>(m) *
                               static_cast<double>(k) / static_cast<double>(n);
            acc += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<std::complex<double>> random_signal(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return x;
}

} // namespace

TEST_CASE("transform matches naive DFT for assorted lengths", "[fft]") {
    for (std::size_t n : {1u, 2u, 3u, 8u, 12u, 37u, 100u, 256u, 500u, 1000u}) {
        const auto x = random_signal(n, 40 + n);
        for (int sign : {+1, -1}) {
            const auto fast = fft::transform(x, sign);
            const auto slow = naive_dft(x, sign);
            double worst = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                worst = std::max(worst, std::abs(fast[k] - slow[k]));
                scale = std::max(scale, std::abs(slow[k]));
            }
            INFO("n=" << n << " sign=" << sign);
            CHECK(worst <= 1e-11 * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("forward then inverse recovers the signal", "[fft]") {
    for (std::size_t n : {64u, 2000u}) {
        const auto x = random_signal(n, 7);
        auto y = fft::transform(x, -1);
        y = fft::transform(y, +1);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(y[i].real() / static_cast<double>(n) == Approx(x[i].real()).margin(1e-11));
            CHECK(y[i].imag() / static_cast<double>(n) == Approx(x[i].imag()).margin(1e-11));
        }
    }
}

TEST_CASE("plan reuse is consistent", "[fft]") {
    const std::size_t n = 600;
    fft::Plan plan(n);
    auto a = random_signal(n, 9);
    auto b = a;
    plan.execute(a.data(), +1);
    plan.execute(b.data(), +1);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("zero length rejected", "[fft]") {
    CHECK_THROWS_AS(fft::Plan(0), ValidationError);
}
