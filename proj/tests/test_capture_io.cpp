#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rbt/capture_io.hpp"
#include "rbt/radar.hpp"

using Catch::Approx;
using namespace rbt;

namespace {

radar::FrameCapture small_capture() {
    radar::RadarConfig c;
    c.range_end_m = 0.5; // 10 bins
    radar::Scene scene{radar::Reflector{0.25, {0.9, -0.4}, radar::Static{}}};
    const auto pulse = radar::PulseShape::gaussian_for_bandwidth(c.bandwidth_hz);
    auto capture = radar::synthesize_capture(c, pulse, scene, 0.02, 7); // 4 frames
    capture.annotations["d_air_m"] = "1.0";
    capture.annotations["scenario_digest"] = "deadbeef00000000";
    return capture;
}

} // namespace

TEST_CASE("byte layout: magic and little-endian header", "[capture_io]") {
    const auto capture = small_capture();
    const auto bytes = io::capture_to_bytes(capture);

    REQUIRE(bytes.size() > 18);
    CHECK(bytes.substr(0, 4) == "RBT1");
    // version 1, u16 LE
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);
    // P = 4, u32 LE
    CHECK(static_cast<unsigned char>(bytes[6]) == 4);
    CHECK(static_cast<unsigned char>(bytes[7]) == 0);
    CHECK(static_cast<unsigned char>(bytes[8]) == 0);
    CHECK(static_cast<unsigned char>(bytes[9]) == 0);
    // N = 10, u32 LE
    CHECK(static_cast<unsigned char>(bytes[10]) == 10);
    CHECK(static_cast<unsigned char>(bytes[11]) == 0);

    std::uint32_t meta_len = 0;
    for (int i = 0; i < 4; ++i)
        meta_len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[14 + i])) << (8 * i);
    CHECK(bytes.size() == 18 + meta_len + 4 * 10 * 8);
    CHECK(bytes.substr(18, 1) == "{"); // JSON metadata follows the header
}

TEST_CASE("round trip preserves config, metadata and samples", "[capture_io]") {
    const auto original = small_capture();
    const auto restored = io::capture_from_bytes(io::capture_to_bytes(original));

    CHECK(restored.frame_count == original.frame_count);
    CHECK(restored.bin_count == original.bin_count);
    CHECK(restored.seed == original.seed);
    CHECK(restored.annotations == original.annotations);
    CHECK(restored.config.range_res_m == original.config.range_res_m);
    CHECK(restored.config.frame_rate_hz == original.config.frame_rate_hz);
    // float32 storage: relative error bounded by mantissa precision
    for (std::size_t i = 0; i < original.samples.size(); ++i) {
        CHECK(restored.samples[i].real() ==
              Approx(original.samples[i].real()).margin(1e-6).epsilon(1e-6));
        CHECK(restored.samples[i].imag() ==
              Approx(original.samples[i].imag()).margin(1e-6).epsilon(1e-6));
    }
}

TEST_CASE("identical captures serialize to identical bytes", "[capture_io]") {
    const auto a = io::capture_to_bytes(small_capture());
    const auto b = io::capture_to_bytes(small_capture());
    CHECK(a == b);
}

TEST_CASE("corrupt inputs are rejected", "[capture_io]") {
    auto bytes = io::capture_to_bytes(small_capture());

    SECTION("bad magic") {
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(io::capture_from_bytes(bad), IoError);
    }
    SECTION("truncated payload") {
        CHECK_THROWS_AS(io::capture_from_bytes(bytes.substr(0, bytes.size() - 5)), IoError);
        CHECK_THROWS_AS(io::capture_from_bytes(bytes.substr(0, 10)), IoError);
    }
    SECTION("trailing garbage") {
        CHECK_THROWS_AS(io::capture_from_bytes(bytes + "extra"), IoError);
    }
    SECTION("mangled metadata") {
        auto bad = bytes;
        bad[20] = '!';
        CHECK_THROWS_AS(io::capture_from_bytes(bad), IoError);
    }
}

TEST_CASE("file round trip", "[capture_io]") {
    const auto path = std::filesystem::temp_directory_path() /
                      ("rbt_capture_io_test_" + std::to_string(::getpid()) + ".rbt");
    const auto original = small_capture();
    io::write_capture(path, original);
    const auto restored = io::read_capture(path);
    CHECK(restored.frame_count == original.frame_count);
    CHECK(restored.annotations == original.annotations);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(io::read_capture(path), IoError); // gone now
}
