#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rbt/tag.hpp"

using Catch::Approx;
using namespace rbt;
using namespace rbt::tags;

namespace {

soil::SoilTexture lossless_texture() {
    soil::SoilTexture t;
    t.klass = soil::TextureClass::kCustom;
    t.theta_sat = 0.45;
    t.ec_sat = 0.0;
    return t;
}

} // namespace

TEST_CASE("battery life projections", "[tag]") {
    const auto battery = Battery::four_aa();
    CHECK(battery.energy_mwh() == Approx(15000.0));

    SECTION("semi-passive always-on lands near the 15-year mark") {
        const auto profile = PowerProfile::semi_passive_always_on();
        CHECK(profile.average_draw_mw() == Approx(0.1167).margin(1e-6));
        const double years = battery_life_years(profile, battery);
        CHECK(years == Approx(15.02).epsilon(0.05)); // within 5 %
        CHECK(years == Approx(14.673).margin(0.01));
    }

    SECTION("active always-on drains in about 42 hours") {
        const auto profile = PowerProfile::active_always_on();
        CHECK(profile.average_draw_mw() == Approx(354.495).margin(0.001));
        const double hours = battery_life_years(profile, battery) * 8760.0;
        CHECK(hours == Approx(15000.0 / 354.495).epsilon(1e-9));
        CHECK(hours == Approx(42.3).margin(0.1));
    }

    SECTION("duty-cycled active build lands in the 3-4 year band") {
        const double years = battery_life_years(PowerProfile::active_duty_cycled(), battery);
        CHECK(years >= 3.0);
        CHECK(years <= 4.0);
    }

    SECTION("halving the draw exactly doubles the lifetime") {
        PowerProfile profile = PowerProfile::semi_passive_always_on();
        const double base = battery_life_years(profile, battery);
        profile.oscillator.active_mw /= 2.0;
        profile.rf_switch.active_mw /= 2.0;
        profile.power_mgmt.active_mw /= 2.0;
        CHECK(battery_life_years(profile, battery) == Approx(2.0 * base).epsilon(1e-12));
    }

    SECTION("zero draw rejected") {
        CHECK_THROWS_AS(battery_life_years(PowerProfile{}, battery), ValidationError);
    }
}

TEST_CASE("wake link margin", "[tag]") {
    CHECK(wake_link_margin_db(36.0, 85.0, -75.0) == Approx(26.0));
    CHECK(wake_link_margin_db(10.0, 85.0, -75.0) == Approx(0.0));
    CHECK(wake_link_margin_db(30.0, 90.0, -55.0) == Approx(-5.0));
}

TEST_CASE("tag as scene reflector", "[tag]") {
    radar::RadarConfig radar_config;

    SECTION("dry lossless soil adds no stretching or loss") {
        TagConfig tag;
        tag.depth_m = 0.30;
        auto profile = soil::SoilProfile::uniform(1.0, 0.0, lossless_texture());
        const auto r = tag_as_reflector(tag, profile, 1.0, radar_config);
        CHECK(r.distance_m == Approx(1.30).margin(1e-6));
        CHECK(std::abs(r.amplitude) == Approx(tag.base_rcs_amplitude).epsilon(1e-9));
        CHECK(std::holds_alternative<radar::OnOffSquare>(r.modulation));
        const auto& ook = std::get<radar::OnOffSquare>(r.modulation);
        CHECK(ook.freq_hz == 80.0);
        CHECK(ook.duty == 0.5);
    }

    SECTION("Ka_eff = 9 stretches 0.30 m of soil to 0.90 m") {
        // theta pinned so the Topp inverse returns exactly Ka = 9
        const double theta_ka9 = soil::evaluate_cubic(soil::kToppCoefficients, 9.0);
        TagConfig tag;
        tag.depth_m = 0.30;
        auto profile = soil::SoilProfile::uniform(1.0, theta_ka9, lossless_texture());
        const auto r = tag_as_reflector(tag, profile, 1.0, radar_config);
        CHECK(r.distance_m == Approx(1.90).margin(1e-5));
    }

    SECTION("active gain is a pure amplitude ratio") {
        auto profile = soil::SoilProfile::uniform(1.0, 0.2, soil::SoilTexture::sandy_clay_loam());
        TagConfig semi;
        TagConfig active = semi;
        active.mode = TagMode::kActive;
        active.gain_db = 12.0;
        const auto r_semi = tag_as_reflector(semi, profile, 1.0, radar_config);
        const auto r_active = tag_as_reflector(active, profile, 1.0, radar_config);
        CHECK(std::abs(r_active.amplitude) / std::abs(r_semi.amplitude) ==
              Approx(std::pow(10.0, 12.0 / 20.0)).epsilon(1e-12));
        CHECK(std::abs(r_active.amplitude) / std::abs(r_semi.amplitude) == Approx(3.98).margin(0.01));
        CHECK(r_active.distance_m == Approx(r_semi.distance_m));
    }

    SECTION("apparent distance strictly increases with moisture") {
        TagConfig tag;
        double prev = 0.0;
        for (double theta = 0.0; theta <= 0.40; theta += 0.05) {
            auto profile =
                soil::SoilProfile::uniform(1.0, theta, soil::SoilTexture::sandy_clay_loam());
            const auto r = tag_as_reflector(tag, profile, 1.0, radar_config);
            CHECK(r.distance_m > prev);
            prev = r.distance_m;
        }
    }

    SECTION("amplitude decays with depth in lossy soil, constant in lossless") {
        radar::RadarConfig big_window = radar_config;
        big_window.range_end_m = 8.0;
        auto lossy = soil::SoilProfile::uniform(2.0, 0.2, soil::SoilTexture::clay_loam());
        auto lossless = soil::SoilProfile::uniform(2.0, 0.2, lossless_texture());
        double prev_lossy = 1e300;
        for (double depth = 0.2; depth <= 1.0; depth += 0.2) {
            TagConfig tag;
            tag.depth_m = depth;
            const auto a_lossy = std::abs(tag_as_reflector(tag, lossy, 1.0, big_window).amplitude);
            const auto a_free =
                std::abs(tag_as_reflector(tag, lossless, 1.0, big_window).amplitude);
            CHECK(a_lossy < prev_lossy);
            CHECK(a_free == Approx(1.0).epsilon(1e-9));
            prev_lossy = a_lossy;
        }
    }

    SECTION("profile must cover the tag") {
        TagConfig tag;
        tag.depth_m = 0.6;
        auto shallow = soil::SoilProfile::uniform(0.5, 0.1, soil::SoilTexture::silt_loam());
        CHECK_THROWS_AS(tag_as_reflector(tag, shallow, 1.0, radar_config), ValidationError);
    }

    SECTION("oscillation above Nyquist rejected") {
        TagConfig tag;
        tag.osc_freq_hz = 120.0; // frame rate 200
        auto profile = soil::SoilProfile::uniform(1.0, 0.1, soil::SoilTexture::silt_loam());
        CHECK_THROWS_AS(tag_as_reflector(tag, profile, 1.0, radar_config), ValidationError);
    }
}
