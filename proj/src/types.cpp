#include "sentinel/types.hpp"

namespace sentinel {

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Fire:
            return "fire";
        case Scenario::GasLeak:
            return "gas_leak";
        case Scenario::WaterLeak:
            return "water_leak";
        case Scenario::Earthquake:
            return "earthquake";
        case Scenario::Intrusion:
            return "intrusion";
    }
    return "unknown";
}

bool scenario_from_name(const std::string& name, Scenario& out) {
    for (std::size_t i = 0; i < kScenarioCount; ++i) {
        auto s = static_cast<Scenario>(i);
        if (name == scenario_name(s)) {
            out = s;
            return true;
        }
    }
    return false;
}

std::string to_string(const SessionId& id) {
    return std::to_string(id.initiator) + ":" + std::to_string(id.seq);
}

}  // namespace sentinel
