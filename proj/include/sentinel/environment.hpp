#pragma once

#include <memory>
#include <set>
#include <variant>
#include <vector>

#include "sentinel/detection.hpp"
#include "sentinel/trace.hpp"
#include "sentinel/types.hpp"

namespace sentinel::sim {

// Parametric stimulus shapes. The gas channels react after a dispersal
// delay and ramp up to their full amplitude; temperature ramps from the
// event onward.
struct FireParams {
    double delay_s = 10.0;
    double rise_s = 10.0;
    double co_amp = 400.0;
    double odor_amp = 400.0;
    double temp_rise_c = 30.0;
    double temp_ramp_s = 60.0;
};

struct GasParams {
    double delay_s = 2.0;
    double rise_s = 10.0;
    double odor_amp = 400.0;
    // Cross-sensitivity: the CO sensor also reacts to the odorized gas.
    double co_amp = 250.0;
};

struct QuakeParams {
    double duration_s = 0.8;
    double peak_g = 2.5;
    double xy_peak_g = 0.4;
    double freq_hz = 12.5;
};

// Timed ground-truth actions driving the environment and fault injection.
struct FireStart {
    std::vector<NodeId> nodes;
    FireParams params;
};
struct GasRelease {
    std::vector<NodeId> nodes;
    GasParams params;
};
struct WaterPresent {
    NodeId node = 0;
    bool present = true;
};
struct MassDrop {
    std::vector<NodeId> nodes;
    QuakeParams params;
};
struct Motion {
    NodeId node = 0;
    SimTime duration_ms = 2000;
};
struct DoorState {
    NodeId node = 0;
    bool open = true;
};
struct NodeOff {
    NodeId node = 0;
};
struct NodeOn {
    NodeId node = 0;
};
struct ArmIntrusion {
    bool armed = true;
};

using ScriptActionBody = std::variant<FireStart, GasRelease, WaterPresent, MassDrop, Motion,
                                      DoorState, NodeOff, NodeOn, ArmIntrusion>;

struct ScriptAction {
    SimTime t_ms = 0;
    ScriptActionBody body;
};

// Ordered ground-truth schedule; times must be non-decreasing.
using StimulusScript = std::vector<ScriptAction>;

void validate_script(const StimulusScript& script);

const char* script_action_name(const ScriptActionBody& body);

// Total functions of time for every sensor channel, per node. Built from
// ambient base levels plus stimulus contributions gated by each event's
// exposure set; a channel may instead be bound to a replayed trace column.
class Environment {
  public:
    double co_base = 400.0;
    double odor_base = 1300.0;
    double temp_base_c = 21.0;

    void apply(const ScriptAction& action);

    // Replays a trace column as the channel for the given nodes. Trace
    // time zero is aligned to align_at_ms in simulation time.
    void bind_trace(detect::SensorKind kind, std::shared_ptr<const Trace> trace,
                    const std::string& column, std::vector<NodeId> nodes, SimTime align_at_ms);

    // Raw physical value seen by `node` at time `t`. Accelerometer range
    // clipping belongs to the sensor model, not to the environment.
    double value(NodeId node, detect::SensorKind kind, SimTime t) const;

  private:
    struct TimedFire {
        SimTime t0 = 0;
        std::set<NodeId> exposed;
        FireParams p;
    };
    struct TimedGas {
        SimTime t0 = 0;
        std::set<NodeId> exposed;
        GasParams p;
    };
    struct TimedQuake {
        SimTime t0 = 0;
        std::set<NodeId> exposed;
        QuakeParams p;
    };
    struct BinarySwitch {
        SimTime t = 0;
        bool on = false;
    };
    struct TraceBinding {
        detect::SensorKind kind;
        std::shared_ptr<const Trace> trace;
        std::string column;
        std::set<NodeId> nodes;
        SimTime align_at_ms = 0;
    };

    double binary_state(const std::vector<BinarySwitch>& history, SimTime t) const;

    std::vector<TimedFire> fires_;
    std::vector<TimedGas> gas_releases_;
    std::vector<TimedQuake> quakes_;
    std::map<NodeId, std::vector<BinarySwitch>> water_;
    std::map<NodeId, std::vector<BinarySwitch>> motion_;
    std::map<NodeId, std::vector<BinarySwitch>> door_;
    std::vector<TraceBinding> traces_;
};

}  // namespace sentinel::sim
