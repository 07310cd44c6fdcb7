#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sentinel/sim.hpp"

namespace sentinel::cli {

// Configuration rejection; the message names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A full run description: the simulation inputs plus bookkeeping for
// reports. `raw` holds the normalized JSON form the config was built
// from, which presets also serialize to.
struct RunConfig {
    std::string name;
    sim::SimulationConfig sim;
    nlohmann::json raw;
};

// Parses and validates a config document. Unknown keys are errors.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& file);

// Applies one `dotted.path=value` override to a config document. Numeric
// path segments index arrays; values parse as JSON when possible and fall
// back to strings.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace sentinel::cli
