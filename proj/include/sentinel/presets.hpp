#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sentinel/config.hpp"

namespace sentinel::cli::presets {

// Names of all built-in simulation presets.
std::vector<std::string> sim_preset_names();

// Returns the preset's config document, or nullopt for unknown names.
std::optional<nlohmann::json> sim_preset(const std::string& name);

// Parametric builders behind the named presets.
nlohmann::json fire_oven(int exposed_count);
nlohmann::json gas_oven(int exposed_count);
nlohmann::json water_dishwasher(NodeId wet_node);
nlohmann::json earthquake_massdrop(int exposed_count);
nlohmann::json intrusion_case(int case_number);  // 1..6
// k nodes switched off before a water stimulus; wet_nodes empty means all.
nlohmann::json nodefail(int k_failed, std::vector<NodeId> wet_nodes = {});

// Communication-range scenarios (i)..(v).
std::vector<std::string> range_preset_names();
std::optional<sim::RangeSpec> range_preset(const std::string& name, std::uint64_t seed,
                                           int loops, int messages, SimTime gap_ms);

}  // namespace sentinel::cli::presets
