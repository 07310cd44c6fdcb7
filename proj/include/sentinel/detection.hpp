#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "sentinel/types.hpp"

namespace sentinel::detect {

enum class SensorKind : std::uint8_t {
    CO,
    OdorGas,
    Temperature,
    AccelX,
    AccelY,
    AccelZ,
    WaterProbe,
    PIR,
    Hall,
};

const char* sensor_name(SensorKind k);

// Trigger levels. Gas thresholds are raw units above the calibrated
// baseline; the gradient discriminates fire from gas leakage.
struct ThresholdSet {
    float co_above_baseline = 150.0f;
    float odor_above_baseline = 150.0f;
    float temp_gradient_c_per_s = 0.2f;
    float gradient_interval_s = 60.0f;
    float accel_g = 0.8f;
};

// Reference levels for the qualitative gas sensors, taken as the mean of
// exactly kGasCalibrationSamples post-preheat measurements.
struct GasCalibration {
    float baseline_co = 0.0f;
    float baseline_odor = 0.0f;
};

inline constexpr std::size_t kGasCalibrationSamples = 300;

// Accelerometer resolution window; raw readings outside it are cut off.
inline constexpr float kAccelClipG = 2.0f;
// Resting z-axis value (gravity).
inline constexpr float kGravityG = 1.0f;

struct WrongSampleCount : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InsufficientWindow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotCalibrated : std::logic_error {
    using std::logic_error::logic_error;
};

GasCalibration calibrate_gas(std::span<const float> co_samples,
                             std::span<const float> odor_samples);

// Temperature rise rate in degC/s over `interval_s`, using the samples
// nearest to the interval endpoints. The window is (time_s, degC) pairs in
// non-decreasing time order and must span at least interval_s.
float temp_gradient(std::span<const std::pair<double, float>> window, float interval_s);

// Joint gas classification. Fire needs both gas excesses plus a steep
// temperature gradient; an odor excess without the gradient is a gas leak.
std::optional<Scenario> classify_gas_event(float co, float odor,
                                           const std::optional<GasCalibration>& cal,
                                           float gradient_c_per_s, const ThresholdSet& th);

float clip_accel(float g);

// True when any axis deviates from rest by at least th.accel_g, with the
// z rest value at 1 g. Inputs are clipped to the sensor range first.
bool detect_earthquake(float ax, float ay, float az, const ThresholdSet& th);

bool detect_water(float probe);

struct IntrusionResult {
    bool initiate = false;
    float vote = 0.0f;
};

// PIR starts the voting, the hall sensor only contributes to the vote.
// Disarmed nodes neither initiate nor vote.
IntrusionResult detect_intrusion(float pir, float hall_open, bool armed);

}  // namespace sentinel::detect
