#pragma once

#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentinel/environment.hpp"
#include "sentinel/power.hpp"
#include "sentinel/protocol.hpp"
#include "sentinel/topology.hpp"

namespace sentinel::sim {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One structured line of the run's event log.
struct LogRecord {
    SimTime time_ms = 0;
    std::optional<NodeId> node;
    std::string event;
    nlohmann::json details;
};

std::string to_json_line(const LogRecord& r);

struct SensorNoise {
    double gas_sigma = 0.0;
    double temp_sigma = 0.0;
    double accel_sigma = 0.0;
};

struct TraceBindingSpec {
    std::string file;
    std::string column;
    detect::SensorKind sensor = detect::SensorKind::CO;
    std::vector<NodeId> nodes;
    SimTime align_at_ms = 0;
};

struct SimulationConfig {
    Topology topology;
    StimulusScript script;
    ProtocolConfig protocol;                          // shared defaults
    std::map<NodeId, ProtocolConfig> protocol_overrides;
    detect::ThresholdSet thresholds;
    power::StageProfile profile;
    SensorNoise noise;
    std::vector<TraceBindingSpec> traces;
    double co_base = 400.0;
    double odor_base = 1300.0;
    double temp_base_c = 21.0;
    SimTime end_time_ms = 60000;
    SimTime detect_interval_ms = 1000;
    SimTime ulp_interval_ms = 1000;
    // Re-initiation lockout after a scenario was decided on a node.
    SimTime retrigger_holdoff_ms = 60000;
    bool armed_at_start = false;
    std::uint64_t seed = 1;

    void validate() const;
};

struct DecisionRecord {
    SimTime time_ms = 0;
    NodeId node = 0;
    SessionId session;
    Scenario scenario = Scenario::Fire;
    bool accepted = false;
    double total = 0.0;
    bool local = false;
    bool rebalanced = false;
};

struct MessageCounts {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::map<std::string, std::uint64_t> dropped;

    std::uint64_t dropped_total() const;
};

struct RunResult {
    std::vector<LogRecord> log;
    std::vector<DecisionRecord> decisions;
    MessageCounts messages;
    std::map<NodeId, power::EnergyLedger> energy;
    SimTime end_time_ms = 0;
    std::uint64_t seed = 0;

    bool network_accepted(Scenario s) const;
    std::optional<SimTime> first_accept_time(Scenario s) const;
    std::vector<std::string> log_lines() const;
};

// Deterministic seeded discrete-event run of the full protocol over the
// given topology and stimulus script.
RunResult run(const SimulationConfig& cfg);

// Standalone communication-range harness: each transmitter sends a fixed
// message train to every receiver per loop while receivers stay awake and
// count arrivals per sender.
struct RangeSpec {
    Topology topology;
    std::vector<NodeId> transmitters;
    std::vector<NodeId> receivers;
    int messages_per_loop = 1000;
    SimTime gap_ms = 10;
    int loops = 50;
    std::uint64_t seed = 1;
};

struct RangeResult {
    // counts[loop][(receiver, transmitter)] = received messages
    std::vector<std::map<std::pair<NodeId, NodeId>, int>> loop_counts;

    double mean_received(NodeId receiver, NodeId transmitter) const;
    int min_received(NodeId receiver, NodeId transmitter) const;
};

RangeResult range_test(const RangeSpec& spec);

}  // namespace sentinel::sim
