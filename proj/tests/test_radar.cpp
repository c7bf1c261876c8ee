#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "rbt/radar.hpp"

using Catch::Approx;
using namespace rbt;
using namespace rbt::radar;

namespace {

RadarConfig quiet_config() {
    RadarConfig c;
    c.noise_sigma = 0.0;
    return c;
}

PulseShape default_pulse(const RadarConfig& c) {
    return PulseShape::gaussian_for_bandwidth(c.bandwidth_hz);
}

std::size_t argmax_bin(const std::vector<std::complex<double>>& row) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < row.size(); ++n)
        if (std::abs(row[n]) > std::abs(row[best])) best = n;
    return best;
}

} // namespace

TEST_CASE("range bin indexing", "[radar]") {
    RadarConfig c = quiet_config();
    c.range_start_m = 0.0;
    c.range_res_m = 0.05;

    CHECK(bin_of_distance(c, 0.47) == 9); // 45-50 cm bucket, zero-based
    CHECK(bin_of_distance(c, 0.0) == 0);
    CHECK(bin_of_distance(c, c.range_end_m - 1e-9) == c.bin_count() - 1);
    CHECK_THROWS_AS(bin_of_distance(c, c.range_end_m), ValidationError);
    CHECK_THROWS_AS(bin_of_distance(c, -0.01), ValidationError);

    CHECK(distance_of_bin(c, 9) == Approx(0.475));
    CHECK(bin_of_distance(c, distance_of_bin(c, 31)) == 31);
}

TEST_CASE("pulse shape", "[radar]") {
    const auto pulse = PulseShape::gaussian_for_bandwidth(3e9);

    SECTION("unit peak at zero is the global maximum") {
        CHECK(std::abs(pulse.evaluate(0.0, 1.5e9)) == Approx(1.0));
        for (double t = -2e-9; t <= 2e-9; t += 1e-12)
            CHECK(pulse.envelope(t) <= 1.0);
        CHECK(pulse.envelope(pulse.support_s() * 1.01) == 0.0);
    }

    SECTION("-10 dB power bandwidth equals the configured bandwidth") {
        // Numerical spectrum of the analytic pulse via direct summation.
        const double bw = 3e9, fc = 1.5e9;
        const double dt = 1.0 / (40.0 * bw);
        auto spectrum_mag = [&](double f) {
            std::complex<double> acc{0.0, 0.0};
            for (double t = -pulse.support_s(); t <= pulse.support_s(); t += dt)
                acc += pulse.evaluate(t, fc) * std::polar(1.0, -2.0 * kPi * f * t);
            return std::abs(acc);
        };
        const double s0 = spectrum_mag(fc);
        const double upper_db = 20.0 * std::log10(spectrum_mag(fc + bw / 2.0) / s0);
        const double lower_db = 20.0 * std::log10(spectrum_mag(fc - bw / 2.0) / s0);
        CHECK(upper_db == Approx(-10.0).margin(0.3));
        CHECK(lower_db == Approx(-10.0).margin(0.3));
    }

    SECTION("ideal sinc variant") {
        const auto sinc = PulseShape::ideal_sinc(3e9);
        CHECK(std::abs(sinc.evaluate(0.0, 1.5e9)) == Approx(1.0));
        CHECK(sinc.envelope(1.0 / 3e9) == Approx(0.0).margin(1e-12)); // first null
    }
}

TEST_CASE("single static echo", "[radar]") {
    RadarConfig c = quiet_config();
    const std::complex<double> amp{0.8, 0.3};
    Scene scene{Reflector{1.5, amp, Static{}}}; // exactly on the bin grid: 1.5/0.05 = 30
    SplitMix64 rng(1);
    const auto row = synthesize_frame(c, default_pulse(c), scene, 0, rng);

    CHECK(row.size() == c.bin_count());
    CHECK(std::abs(row[30]) == Approx(std::abs(amp)).epsilon(1e-12));
    CHECK(argmax_bin(row) == 30);
    // beyond the pulse support the response is exactly zero
    CHECK(std::abs(row[36]) == 0.0);
    CHECK(std::abs(row[24]) == 0.0);
}

TEST_CASE("tx amplitude scales the whole echo", "[radar]") {
    RadarConfig c = quiet_config();
    Scene scene{Reflector{1.5, {1.0, 0.0}, Static{}}};
    SplitMix64 rng(1);
    const auto base = synthesize_frame(c, default_pulse(c), scene, 0, rng);
    c.tx_amplitude = 2.5;
    const auto scaled = synthesize_frame(c, default_pulse(c), scene, 0, rng);
    for (std::size_t n = 0; n < base.size(); ++n)
        CHECK(std::abs(scaled[n] - 2.5 * base[n]) <= 1e-12);
}

TEST_CASE("on-off keyed reflector gates on the square wave", "[radar]") {
    RadarConfig c = quiet_config();
    Scene keyed{Reflector{1.5, {1.0, 0.0}, OnOffSquare{80.0, 0.5, 0.0}}};
    Scene steady{Reflector{1.5, {1.0, 0.0}, Static{}}};
    const auto pulse = default_pulse(c);
    SplitMix64 rng(1);

    for (std::size_t m = 0; m < 10; ++m) {
        const double cycles = 80.0 * static_cast<double>(m) / c.frame_rate_hz;
        const bool on = (cycles - std::floor(cycles)) < 0.5;
        const auto row = synthesize_frame(c, pulse, keyed, m, rng);
        const auto ref = synthesize_frame(c, pulse, steady, m, rng);
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (on)
                CHECK(row[n] == ref[n]);
            else
                CHECK(std::abs(row[n]) == 0.0);
        }
    }
}

TEST_CASE("linear velocity advances carrier phase per frame", "[radar]") {
    RadarConfig c = quiet_config();
    const double v = 3.5;
    Scene scene{Reflector{2.0, {1.0, 0.0}, LinearVelocity{v}}};
    const auto pulse = default_pulse(c);
    SplitMix64 rng(1);
    const std::size_t bin = 40; // 2.0 / 0.05

    const auto expected_step =
        std::polar(1.0, -2.0 * kPi * 2.0 * v * c.pri_s() / c.wavelength_m());
    for (std::size_t m = 0; m < 5; ++m) {
        const auto row0 = synthesize_frame(c, pulse, scene, m, rng);
        const auto row1 = synthesize_frame(c, pulse, scene, m + 1, rng);
        const auto ratio = row1[bin] / row0[bin];
        CHECK(ratio.real() == Approx(expected_step.real()).margin(1e-9));
        CHECK(ratio.imag() == Approx(expected_step.imag()).margin(1e-9));
    }
}

TEST_CASE("superposition of scenes", "[radar]") {
    RadarConfig c = quiet_config();
    const auto pulse = default_pulse(c);
    Scene a{Reflector{1.2, {0.7, 0.2}, Static{}}};
    Scene b{Reflector{2.3, {0.4, -0.1}, OnOffSquare{80.0, 0.5, 0.0}},
            Reflector{1.3, {0.2, 0.0}, Static{}}};
    Scene both = a;
    both.insert(both.end(), b.begin(), b.end());

    SplitMix64 rng(1);
    for (std::size_t m : {0u, 1u, 2u, 7u}) {
        const auto ra = synthesize_frame(c, pulse, a, m, rng);
        const auto rb = synthesize_frame(c, pulse, b, m, rng);
        const auto rab = synthesize_frame(c, pulse, both, m, rng);
        for (std::size_t n = 0; n < rab.size(); ++n)
            CHECK(std::abs(rab[n] - (ra[n] + rb[n])) <= 1e-14);
    }
}

TEST_CASE("moving a reflector one bin shifts the peak one bin", "[radar]") {
    RadarConfig c = quiet_config();
    const auto pulse = default_pulse(c);
    SplitMix64 rng(1);
    const auto r1 = synthesize_frame(c, pulse, {Reflector{1.50, {1.0, 0.0}, Static{}}}, 0, rng);
    const auto r2 = synthesize_frame(c, pulse, {Reflector{1.55, {1.0, 0.0}, Static{}}}, 0, rng);
    CHECK(argmax_bin(r2) == argmax_bin(r1) + 1);
}

TEST_CASE("capture synthesis", "[radar]") {
    RadarConfig c; // default noise
    Scene scene{Reflector{1.5, {1.0, 0.0}, OnOffSquare{80.0, 0.5, 0.0}}};
    const auto pulse = default_pulse(c);

    SECTION("frame count follows duration") {
        const auto capture = synthesize_capture(c, pulse, scene, 10.0, 42);
        CHECK(capture.frame_count == 2000);
        CHECK(capture.bin_count == c.bin_count());
        capture.validate();
    }

    SECTION("deterministic for a fixed seed") {
        const auto a = synthesize_capture(c, pulse, scene, 1.0, 42);
        const auto b = synthesize_capture(c, pulse, scene, 1.0, 42);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

        const auto other = synthesize_capture(c, pulse, scene, 1.0, 43);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            if (a.samples[i] != other.samples[i]) any_diff = true;
        CHECK(any_diff);
    }

    SECTION("a standalone frame reproduces the capture row") {
        const auto capture = synthesize_capture(c, pulse, scene, 0.5, 42);
        const std::size_t m = 17;
        SplitMix64 rng(SplitMix64::derive_stream(42, m));
        const auto row = synthesize_frame(c, pulse, scene, m, rng);
        for (std::size_t n = 0; n < capture.bin_count; ++n) CHECK(row[n] == capture.at(m, n));
    }

    SECTION("noise-free empty scene is all zeros") {
        RadarConfig q = quiet_config();
        const auto capture = synthesize_capture(q, pulse, {}, 0.5, 42);
        for (const auto& s : capture.samples) CHECK(s == std::complex<double>{0.0, 0.0});
    }

    SECTION("memory cap enforced") {
        CHECK_THROWS_AS(synthesize_capture(c, pulse, scene, 10.0, 42, 0.0, 1024),
                        ValidationError);
    }

    SECTION("bad inputs rejected") {
        CHECK_THROWS_AS(synthesize_capture(c, pulse, scene, -1.0, 42), ValidationError);
        Scene outside{Reflector{c.range_end_m + 1.0, {1.0, 0.0}, Static{}}};
        CHECK_THROWS_AS(synthesize_capture(c, pulse, outside, 1.0, 42), ValidationError);
        Scene bad_duty{Reflector{1.0, {1.0, 0.0}, OnOffSquare{80.0, 0.0, 0.0}}};
        CHECK_THROWS_AS(synthesize_capture(c, pulse, bad_duty, 1.0, 42), ValidationError);
    }
}
