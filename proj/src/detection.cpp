#include "sentinel/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sentinel::detect {

const char* sensor_name(SensorKind k) {
    switch (k) {
        case SensorKind::CO:
            return "co";
        case SensorKind::OdorGas:
            return "odor";
        case SensorKind::Temperature:
            return "temperature";
        case SensorKind::AccelX:
            return "accel_x";
        case SensorKind::AccelY:
            return "accel_y";
        case SensorKind::AccelZ:
            return "accel_z";
        case SensorKind::WaterProbe:
            return "water";
        case SensorKind::PIR:
            return "pir";
        case SensorKind::Hall:
            return "hall";
    }
    return "unknown";
}

namespace {
float mean_of(std::span<const float> samples) {
    double sum = std::accumulate(samples.begin(), samples.end(), 0.0);
    return static_cast<float>(sum / static_cast<double>(samples.size()));
}
}  // namespace

GasCalibration calibrate_gas(std::span<const float> co_samples,
                             std::span<const float> odor_samples) {
    if (co_samples.size() != kGasCalibrationSamples ||
        odor_samples.size() != kGasCalibrationSamples) {
        throw WrongSampleCount("gas calibration needs exactly " +
                               std::to_string(kGasCalibrationSamples) + " samples per sensor");
    }
    return GasCalibration{mean_of(co_samples), mean_of(odor_samples)};
}

float temp_gradient(std::span<const std::pair<double, float>> window, float interval_s) {
    if (window.size() < 2) {
        throw InsufficientWindow("temperature window needs at least two samples");
    }
    const double t_end = window.back().first;
    const double t_start_wanted = t_end - static_cast<double>(interval_s);
    if (window.front().first > t_start_wanted) {
        throw InsufficientWindow("temperature window shorter than gradient interval");
    }
    // Nearest sample at or before t_end - interval.
    std::size_t start = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (window[i].first <= t_start_wanted) {
            start = i;
        } else {
            break;
        }
    }
    // Snap to whichever neighbor is closer to the wanted start time.
    if (start + 1 < window.size()) {
        const double before = t_start_wanted - window[start].first;
        const double after = window[start + 1].first - t_start_wanted;
        if (after < before && window[start + 1].first < t_end) {
            ++start;
        }
    }
    const double dt = t_end - window[start].first;
    if (dt <= 0.0) {
        throw InsufficientWindow("degenerate temperature window");
    }
    return static_cast<float>((window.back().second - window[start].second) / dt);
}

std::optional<Scenario> classify_gas_event(float co, float odor,
                                           const std::optional<GasCalibration>& cal,
                                           float gradient_c_per_s, const ThresholdSet& th) {
    if (!cal.has_value()) {
        throw NotCalibrated("gas sensors not calibrated");
    }
    const bool co_high = co >= cal->baseline_co + th.co_above_baseline;
    const bool odor_high = odor >= cal->baseline_odor + th.odor_above_baseline;
    const bool steep = gradient_c_per_s >= th.temp_gradient_c_per_s;
    if (co_high && odor_high && steep) {
        return Scenario::Fire;
    }
    if (odor_high && !steep) {
        return Scenario::GasLeak;
    }
    return std::nullopt;
}

float clip_accel(float g) {
    return std::clamp(g, -kAccelClipG, kAccelClipG);
}

bool detect_earthquake(float ax, float ay, float az, const ThresholdSet& th) {
    const float dx = std::fabs(clip_accel(ax));
    const float dy = std::fabs(clip_accel(ay));
    const float dz = std::fabs(clip_accel(az) - kGravityG);
    return std::max({dx, dy, dz}) >= th.accel_g;
}

bool detect_water(float probe) {
    return probe >= 0.5f;
}

IntrusionResult detect_intrusion(float pir, float hall_open, bool armed) {
    if (!armed) {
        return {};
    }
    const bool movement = pir >= 0.5f;
    const bool door_open = hall_open >= 0.5f;
    IntrusionResult r;
    r.initiate = movement;
    r.vote = (movement || door_open) ? 1.0f : 0.0f;
    return r;
}

}  // namespace sentinel::detect
