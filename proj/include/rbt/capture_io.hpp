#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbt/errors.hpp"
#include "rbt/radar.hpp"

namespace rbt::io {

inline constexpr char kCaptureMagic[4] = {'R', 'B', 'T', '1'};
inline constexpr std::uint16_t kCaptureVersion = 1;

inline nlohmann::json radar_config_to_json(const radar::RadarConfig& c) {
    return {
        {"center_freq_hz", c.center_freq_hz}, {"bandwidth_hz", c.bandwidth_hz},
        {"frame_rate_hz", c.frame_rate_hz},   {"range_start_m", c.range_start_m},
        {"range_end_m", c.range_end_m},       {"range_res_m", c.range_res_m},
        {"tx_amplitude", c.tx_amplitude},     {"noise_sigma", c.noise_sigma},
    };
}

inline radar::RadarConfig radar_config_from_json(const nlohmann::json& j) {
    radar::RadarConfig c;
    c.center_freq_hz = j.at("center_freq_hz").get<double>();
    c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    c.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    c.range_start_m = j.at("range_start_m").get<double>();
    c.range_end_m = j.at("range_end_m").get<double>();
    c.range_res_m = j.at("range_res_m").get<double>();
    c.tx_amplitude = j.at("tx_amplitude").get<double>();
    c.noise_sigma = j.at("noise_sigma").get<double>();
    return c;
}

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    put_u32(out, bits);
}

class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

    std::string_view take(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw IoError("corrupt capture: truncated file");
        std::string_view v(bytes_.data() + pos_, n);
        pos_ += n;
        return v;
    }

    std::uint16_t u16() {
        const auto b = take(2);
        return static_cast<std::uint16_t>(static_cast<unsigned char>(b[0]) |
                                          (static_cast<unsigned char>(b[1]) << 8));
    }

    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::string bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Serialize a capture to the RBT1 byte layout: magic, little-endian header
/// {version u16, P u32, N u32, metadata_len u32}, JSON metadata, then P*N
/// float32 (real, imag) pairs frame-major.
inline std::string capture_to_bytes(const radar::FrameCapture& capture) {
    capture.validate();
    nlohmann::json meta = {
        {"radar", radar_config_to_json(capture.config)},
        {"seed", capture.seed},
        {"t0_s", capture.t0_s},
        {"annotations", capture.annotations},
    };
    const std::string meta_text = meta.dump();

    std::string out;
    out.reserve(18 + meta_text.size() + capture.samples.size() * 8);
    out.append(kCaptureMagic, 4);
    detail::put_u16(out, kCaptureVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(capture.frame_count));
    detail::put_u32(out, static_cast<std::uint32_t>(capture.bin_count));
    detail::put_u32(out, static_cast<std::uint32_t>(meta_text.size()));
    out.append(meta_text);
    for (const auto& s : capture.samples) {
        detail::put_f32(out, static_cast<float>(s.real()));
        detail::put_f32(out, static_cast<float>(s.imag()));
    }
    return out;
}

inline radar::FrameCapture capture_from_bytes(std::string bytes) {
    detail::Reader r(std::move(bytes));
    const auto magic = r.take(4);
    if (std::string_view(kCaptureMagic, 4) != magic)
        throw IoError("corrupt capture: bad magic");
    const auto version = r.u16();
    if (version != kCaptureVersion)
        throw IoError("corrupt capture: unsupported version " + std::to_string(version));
    const std::uint32_t frames = r.u32();
    const std::uint32_t bins = r.u32();
    const std::uint32_t meta_len = r.u32();
    const auto meta_text = r.take(meta_len);

    radar::FrameCapture capture;
    try {
        const auto meta = nlohmann::json::parse(meta_text);
        capture.config = radar_config_from_json(meta.at("radar"));
        capture.seed = meta.at("seed").get<std::uint64_t>();
        capture.t0_s = meta.at("t0_s").get<double>();
        capture.annotations =
            meta.at("annotations").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("corrupt capture: bad metadata: ") + e.what());
    }
    capture.frame_count = frames;
    capture.bin_count = bins;

    const std::size_t total = static_cast<std::size_t>(frames) * bins;
    if (r.remaining() != total * 8)
        throw IoError("corrupt capture: sample payload length mismatch");
    capture.samples.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const float re = r.f32();
        const float im = r.f32();
        capture.samples[i] = {static_cast<double>(re), static_cast<double>(im)};
    }
    try {
        capture.validate();
    } catch (const ValidationError& e) {
        throw IoError(std::string("corrupt capture: ") + e.what());
    }
    return capture;
}

inline void write_capture(const std::filesystem::path& path, const radar::FrameCapture& capture) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const auto bytes = capture_to_bytes(capture);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline radar::FrameCapture read_capture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return capture_from_bytes(std::move(bytes));
}

} // namespace rbt::io
