#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "sentinel/detection.hpp"

using namespace sentinel;
using namespace sentinel::detect;

TEST_CASE("gas calibration is the mean of exactly 300 samples") {
    std::vector<float> flat(kGasCalibrationSamples, 400.0f);
    auto cal = calibrate_gas(flat, flat);
    CHECK(cal.baseline_co == doctest::Approx(400.0f));
    CHECK(cal.baseline_odor == doctest::Approx(400.0f));

    std::vector<float> ramp(kGasCalibrationSamples);
    std::iota(ramp.begin(), ramp.end(), 1.0f);  // 1..300
    cal = calibrate_gas(ramp, flat);
    CHECK(cal.baseline_co == doctest::Approx(150.5f));

    std::vector<float> wrong(299, 1.0f);
    CHECK_THROWS_AS(calibrate_gas(wrong, flat), WrongSampleCount);
    CHECK_THROWS_AS(calibrate_gas(flat, wrong), WrongSampleCount);
}

TEST_CASE("temperature gradient over the configured interval") {
    // 20 -> 50 degC over 60 s, sampled once per second.
    std::vector<std::pair<double, float>> window;
    for (int i = 0; i <= 60; ++i) {
        window.emplace_back(i, 20.0f + 0.5f * static_cast<float>(i));
    }
    CHECK(temp_gradient(window, 60.0f) == doctest::Approx(0.5f));

    for (auto& [t, v] : window) {
        v = 21.5f;
    }
    CHECK(temp_gradient(window, 60.0f) == doctest::Approx(0.0f));

    std::vector<std::pair<double, float>> tiny{{0.0, 20.0f}, {5.0, 25.0f}};
    CHECK_THROWS_AS(temp_gradient(tiny, 60.0f), InsufficientWindow);
    CHECK_THROWS_AS(temp_gradient(std::span<const std::pair<double, float>>{}, 1.0f),
                    InsufficientWindow);
}

TEST_CASE("gradient is invariant under constant temperature shifts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> temp(15.0f, 40.0f);
    std::uniform_real_distribution<float> shift(-30.0f, 30.0f);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, float>> window;
        for (int i = 0; i <= 30; ++i) {
            window.emplace_back(i * 2.0, temp(rng));
        }
        const float base = temp_gradient(window, 60.0f);
        const float delta = shift(rng);
        for (auto& [t, v] : window) {
            v += delta;
        }
        CHECK(temp_gradient(window, 60.0f) == doctest::Approx(base).epsilon(1e-4));
    }
}

TEST_CASE("gas classification separates fire from leakage by gradient") {
    ThresholdSet th;
    GasCalibration cal{400.0f, 1300.0f};

    CHECK(classify_gas_event(600.0f, 1500.0f, cal, 0.5f, th) == Scenario::Fire);
    // Cross-sensitivity: both sensors high but no temperature rise.
    CHECK(classify_gas_event(600.0f, 1500.0f, cal, 0.0f, th) == Scenario::GasLeak);
    CHECK(classify_gas_event(400.0f, 1300.0f, cal, 0.0f, th) == std::nullopt);
    // CO alone is not enough for either outcome.
    CHECK(classify_gas_event(600.0f, 1300.0f, cal, 0.5f, th) == std::nullopt);

    CHECK_THROWS_AS(classify_gas_event(600.0f, 1500.0f, std::nullopt, 0.5f, th), NotCalibrated);
}

TEST_CASE("gas classification yields at most one scenario and is monotone") {
    ThresholdSet th;
    GasCalibration cal{400.0f, 1300.0f};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<float> co(300.0f, 800.0f);
    std::uniform_real_distribution<float> odor(1200.0f, 1800.0f);
    std::uniform_real_distribution<float> grad(-0.1f, 0.6f);
    for (int trial = 0; trial < 500; ++trial) {
        const float c = co(rng);
        const float o = odor(rng);
        const float g = grad(rng);
        const auto got = classify_gas_event(c, o, cal, g, th);
        // Exclusivity holds structurally; check the Fire conditions really gate it.
        if (got == Scenario::Fire) {
            CHECK(g >= th.temp_gradient_c_per_s);
            CHECK(c >= cal.baseline_co + th.co_above_baseline);
            // Raising a gas value never loses the Fire outcome.
            CHECK(classify_gas_event(c + 100.0f, o, cal, g, th) == Scenario::Fire);
            CHECK(classify_gas_event(c, o + 100.0f, cal, g, th) == Scenario::Fire);
        }
        if (got == Scenario::GasLeak) {
            CHECK(g < th.temp_gradient_c_per_s);
        }
    }
}

TEST_CASE("baseline relativity: scaling excesses and thresholds together") {
    ThresholdSet th;
    GasCalibration cal{400.0f, 1300.0f};
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<float> excess(-200.0f, 400.0f);
    std::uniform_real_distribution<float> scale_dist(0.25f, 4.0f);
    for (int trial = 0; trial < 300; ++trial) {
        const float ec = excess(rng);
        const float eo = excess(rng);
        const float k = scale_dist(rng);
        const auto base = classify_gas_event(cal.baseline_co + ec, cal.baseline_odor + eo, cal,
                                             0.5f, th);
        ThresholdSet scaled = th;
        scaled.co_above_baseline *= k;
        scaled.odor_above_baseline *= k;
        const auto got = classify_gas_event(cal.baseline_co + ec * k, cal.baseline_odor + eo * k,
                                            cal, 0.5f, scaled);
        CHECK(got == base);
    }
}

TEST_CASE("earthquake detection clips to the sensor range") {
    ThresholdSet th;
    CHECK_FALSE(detect_earthquake(0.0f, 0.0f, 1.0f, th));
    // Peak spanning -1g..2g on z.
    CHECK(detect_earthquake(0.0f, 0.0f, -1.0f, th));
    CHECK(detect_earthquake(0.0f, 0.0f, 2.0f, th));
    // Raw 3.5 g clips to 2 g and still trips.
    CHECK(detect_earthquake(0.0f, 0.0f, 3.5f, th));
    CHECK(clip_accel(3.5f) == doctest::Approx(2.0f));
    CHECK(clip_accel(clip_accel(3.5f)) == clip_accel(3.5f));
    CHECK(clip_accel(-9.0f) == doctest::Approx(-2.0f));
    // Small wobble around rest stays quiet.
    CHECK_FALSE(detect_earthquake(0.2f, -0.2f, 1.3f, th));
}

TEST_CASE("water probe is binary") {
    CHECK(detect_water(1.0f));
    CHECK_FALSE(detect_water(0.0f));
}

TEST_CASE("intrusion arming, initiation and vote semantics") {
    // Disarmed is absorbing: nothing initiates, nothing votes.
    for (float pir : {0.0f, 1.0f}) {
        for (float hall : {0.0f, 1.0f}) {
            const auto r = detect_intrusion(pir, hall, false);
            CHECK_FALSE(r.initiate);
            CHECK(r.vote == 0.0f);
        }
    }
    // Movement initiates and votes.
    auto r = detect_intrusion(1.0f, 0.0f, true);
    CHECK(r.initiate);
    CHECK(r.vote == 1.0f);
    // An open door contributes a vote but never initiates.
    r = detect_intrusion(0.0f, 1.0f, true);
    CHECK_FALSE(r.initiate);
    CHECK(r.vote == 1.0f);
    r = detect_intrusion(0.0f, 0.0f, true);
    CHECK_FALSE(r.initiate);
    CHECK(r.vote == 0.0f);
}
