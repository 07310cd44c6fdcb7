#include "sentinel/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sentinel::sim {

using detect::SensorKind;

void validate_script(const StimulusScript& script) {
    SimTime prev = 0;
    for (const auto& action : script) {
        if (action.t_ms < prev) {
            throw std::invalid_argument("script action times must be non-decreasing");
        }
        prev = action.t_ms;
    }
}

const char* script_action_name(const ScriptActionBody& body) {
    struct Namer {
        const char* operator()(const FireStart&) const { return "fire_start"; }
        const char* operator()(const GasRelease&) const { return "gas_release"; }
        const char* operator()(const WaterPresent&) const { return "water_present"; }
        const char* operator()(const MassDrop&) const { return "mass_drop"; }
        const char* operator()(const Motion&) const { return "motion"; }
        const char* operator()(const DoorState&) const { return "door"; }
        const char* operator()(const NodeOff&) const { return "node_off"; }
        const char* operator()(const NodeOn&) const { return "node_on"; }
        const char* operator()(const ArmIntrusion&) const { return "arm_intrusion"; }
    };
    return std::visit(Namer{}, body);
}

namespace {

double ramp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

// Rising contribution that kicks in delay_s after t0 and saturates after
// rise_s more seconds.
double delayed_rise(SimTime now, SimTime t0, double delay_s, double rise_s, double amplitude) {
    if (now < t0) {
        return 0.0;
    }
    const double since_s = static_cast<double>(now - t0) / 1000.0 - delay_s;
    if (since_s <= 0.0) {
        return 0.0;
    }
    return amplitude * (rise_s <= 0.0 ? 1.0 : ramp01(since_s / rise_s));
}

// Damped oscillation burst for the mass-drop impact.
double impact_wave(SimTime now, SimTime t0, const QuakeParams& p, double peak, double phase) {
    if (now < t0) {
        return 0.0;
    }
    const double tau = static_cast<double>(now - t0) / 1000.0;
    if (tau >= p.duration_s) {
        return 0.0;
    }
    const double decay = std::exp(-tau / (p.duration_s / 3.0));
    return peak * std::sin(2.0 * std::numbers::pi * p.freq_hz * tau + phase) * decay;
}

}  // namespace

void Environment::apply(const ScriptAction& action) {
    const SimTime t = action.t_ms;
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, FireStart>) {
                fires_.push_back({t, {body.nodes.begin(), body.nodes.end()}, body.params});
            } else if constexpr (std::is_same_v<T, GasRelease>) {
                gas_releases_.push_back({t, {body.nodes.begin(), body.nodes.end()}, body.params});
            } else if constexpr (std::is_same_v<T, WaterPresent>) {
                water_[body.node].push_back({t, body.present});
            } else if constexpr (std::is_same_v<T, MassDrop>) {
                quakes_.push_back({t, {body.nodes.begin(), body.nodes.end()}, body.params});
            } else if constexpr (std::is_same_v<T, Motion>) {
                motion_[body.node].push_back({t, true});
                motion_[body.node].push_back({t + body.duration_ms, false});
            } else if constexpr (std::is_same_v<T, DoorState>) {
                door_[body.node].push_back({t, body.open});
            } else {
                // Fault injection and arming are runtime events, not
                // physical channels.
            }
        },
        action.body);
}

void Environment::bind_trace(SensorKind kind, std::shared_ptr<const Trace> trace,
                             const std::string& column, std::vector<NodeId> nodes,
                             SimTime align_at_ms) {
    if (!trace->has_column(column)) {
        throw MissingColumn(column);
    }
    traces_.push_back({kind, std::move(trace), column, {nodes.begin(), nodes.end()},
                       align_at_ms});
}

double Environment::binary_state(const std::vector<BinarySwitch>& history, SimTime t) const {
    bool on = false;
    for (const auto& sw : history) {
        if (sw.t > t) {
            break;
        }
        on = sw.on;
    }
    return on ? 1.0 : 0.0;
}

double Environment::value(NodeId node, SensorKind kind, SimTime t) const {
    for (const auto& binding : traces_) {
        if (binding.kind == kind && binding.nodes.count(node) != 0) {
            const SimTime trace_t = t >= binding.align_at_ms ? t - binding.align_at_ms : 0;
            return binding.trace->value_at(binding.column, trace_t);
        }
    }
    switch (kind) {
        case SensorKind::CO: {
            double v = co_base;
            for (const auto& f : fires_) {
                if (f.exposed.count(node) != 0) {
                    v += delayed_rise(t, f.t0, f.p.delay_s, f.p.rise_s, f.p.co_amp);
                }
            }
            for (const auto& g : gas_releases_) {
                if (g.exposed.count(node) != 0) {
                    v += delayed_rise(t, g.t0, g.p.delay_s, g.p.rise_s, g.p.co_amp);
                }
            }
            return v;
        }
        case SensorKind::OdorGas: {
            double v = odor_base;
            for (const auto& f : fires_) {
                if (f.exposed.count(node) != 0) {
                    v += delayed_rise(t, f.t0, f.p.delay_s, f.p.rise_s, f.p.odor_amp);
                }
            }
            for (const auto& g : gas_releases_) {
                if (g.exposed.count(node) != 0) {
                    v += delayed_rise(t, g.t0, g.p.delay_s, g.p.rise_s, g.p.odor_amp);
                }
            }
            return v;
        }
        case SensorKind::Temperature: {
            double v = temp_base_c;
            for (const auto& f : fires_) {
                if (f.exposed.count(node) != 0) {
                    v += delayed_rise(t, f.t0, 0.0, f.p.temp_ramp_s, f.p.temp_rise_c);
                }
            }
            return v;
        }
        case SensorKind::AccelX:
        case SensorKind::AccelY: {
            double v = 0.0;
            const double phase = kind == SensorKind::AccelX ? 0.0 : 1.0;
            for (const auto& q : quakes_) {
                if (q.exposed.count(node) != 0) {
                    v += impact_wave(t, q.t0, q.p, q.p.xy_peak_g, phase);
                }
            }
            return v;
        }
        case SensorKind::AccelZ: {
            double v = detect::kGravityG;
            for (const auto& q : quakes_) {
                if (q.exposed.count(node) != 0) {
                    v += impact_wave(t, q.t0, q.p, q.p.peak_g, std::numbers::pi / 2.0);
                }
            }
            return v;
        }
        case SensorKind::WaterProbe: {
            auto it = water_.find(node);
            return it == water_.end() ? 0.0 : binary_state(it->second, t);
        }
        case SensorKind::PIR: {
            auto it = motion_.find(node);
            return it == motion_.end() ? 0.0 : binary_state(it->second, t);
        }
        case SensorKind::Hall: {
            auto it = door_.find(node);
            return it == door_.end() ? 0.0 : binary_state(it->second, t);
        }
    }
    return 0.0;
}

}  // namespace sentinel::sim
