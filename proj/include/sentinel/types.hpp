#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sentinel {

using NodeId = std::uint16_t;
using SimTime = std::uint64_t;  // milliseconds since run start

inline constexpr NodeId kBroadcastId = 0xFFFF;

// The five emergency scenarios. Numeric encoding is part of the wire format.
enum class Scenario : std::uint8_t {
    Fire = 0,
    GasLeak = 1,
    WaterLeak = 2,
    Earthquake = 3,
    Intrusion = 4,
};

inline constexpr std::size_t kScenarioCount = 5;

const char* scenario_name(Scenario s);

// Parses a scenario name as produced by scenario_name(). Returns false on
// unknown names.
bool scenario_from_name(const std::string& name, Scenario& out);

// One node's vote. `normalized` is the counted value and is always exactly
// 0.0 or 1.0; the window mean rides along for diagnostics.
struct Vote {
    float raw_mean = 0.0f;
    float normalized = 0.0f;
    float weight = 0.0f;

    bool operator==(const Vote&) const = default;
};

// Identifies one voting session: the initiating node plus a per-initiator
// monotonic sequence number. Cascaded sessions get fresh ids.
struct SessionId {
    NodeId initiator = 0;
    std::uint32_t seq = 0;

    auto operator<=>(const SessionId&) const = default;
};

std::string to_string(const SessionId& id);

}  // namespace sentinel
