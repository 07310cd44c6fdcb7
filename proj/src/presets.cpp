#include "sentinel/presets.hpp"

namespace sentinel::cli::presets {

using nlohmann::json;

namespace {

json five_room_nodes(std::vector<double> weights = {}) {
    json nodes = json::array();
    for (int i = 1; i <= 5; ++i) {
        json n{{"id", i}, {"room", "room" + std::to_string(i)}};
        n["weight"] = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i - 1)];
        nodes.push_back(n);
    }
    return nodes;
}

json node_ids(int count) {
    json ids = json::array();
    for (int i = 1; i <= count; ++i) {
        ids.push_back(i);
    }
    return ids;
}

// Accuracy experiments run on bench-style configs: nodes stay listening
// for the whole run so the stimulus lands during a common uptime window.
json base_config(const std::string& name, SimTime end_time_ms) {
    json doc;
    doc["name"] = name;
    doc["seed"] = 1;
    doc["end_time_ms"] = end_time_ms;
    doc["nodes"] = five_room_nodes();
    doc["links"] = {{"mode", "full_mesh"}, {"loss", 0.0}, {"latency_ms", 2}};
    doc["protocol"] = {{"idle_listen_ms", end_time_ms}};
    return doc;
}

}  // namespace

json fire_oven(int exposed_count) {
    json doc = base_config("fire-oven", 45000);
    doc["script"] = json::array({{{"t_ms", 12000},
                                  {"action", "fire_start"},
                                  {"nodes", node_ids(exposed_count)}}});
    return doc;
}

json gas_oven(int exposed_count) {
    json doc = base_config("gas-oven", 40000);
    doc["script"] = json::array({{{"t_ms", 12000},
                                  {"action", "gas_release"},
                                  {"nodes", node_ids(exposed_count)}}});
    return doc;
}

json water_dishwasher(NodeId wet_node) {
    json doc = base_config("water-dishwasher", 30000);
    // The node beside the dishwasher carries enough weight to decide alone.
    doc["nodes"] = five_room_nodes({2.5, 1.0, 1.0, 1.0, 1.0});
    doc["script"] = json::array(
        {{{"t_ms", 12000}, {"action", "water_present"}, {"node", wet_node}}});
    return doc;
}

json earthquake_massdrop(int exposed_count) {
    json doc = base_config("earthquake-massdrop", 30000);
    // Unanimity: the required majority equals the total network weight.
    doc["protocol"]["majority"] = {{"earthquake", 5.0}};
    doc["script"] = json::array({{{"t_ms", 12200},
                                  {"action", "mass_drop"},
                                  {"nodes", node_ids(exposed_count)}}});
    return doc;
}

json intrusion_case(int case_number) {
    json doc = base_config("intrusion-case-" + std::string(1, char('0' + case_number)), 30000);
    doc["armed_at_start"] = true;
    json script = json::array();
    switch (case_number) {
        case 1:
            // Nothing happens.
            break;
        case 2:
            // A door left open, no movement anywhere.
            script.push_back({{"t_ms", 12000}, {"action", "door"}, {"node", 1}, {"open", true}});
            break;
        case 3:
            // Open door in room 1, movement in room 2.
            script.push_back({{"t_ms", 11500}, {"action", "door"}, {"node", 1}, {"open", true}});
            script.push_back(
                {{"t_ms", 12000}, {"action", "motion"}, {"node", 2}, {"duration_ms", 3000}});
            break;
        case 4:
            // A single PIR triggers.
            script.push_back(
                {{"t_ms", 12000}, {"action", "motion"}, {"node", 3}, {"duration_ms", 3000}});
            break;
        case 5:
            // Walking from room 1 to room 2 through a door.
            script.push_back(
                {{"t_ms", 12000}, {"action", "motion"}, {"node", 1}, {"duration_ms", 2500}});
            script.push_back({{"t_ms", 13000}, {"action", "door"}, {"node", 1}, {"open", true}});
            script.push_back(
                {{"t_ms", 13500}, {"action", "motion"}, {"node", 2}, {"duration_ms", 2500}});
            break;
        case 6:
            // Movement in every room at once.
            for (int n = 1; n <= 5; ++n) {
                script.push_back(
                    {{"t_ms", 12000}, {"action", "motion"}, {"node", n}, {"duration_ms", 3000}});
            }
            break;
        default:
            throw ConfigError("intrusion cases are numbered 1..6");
    }
    doc["script"] = script;
    return doc;
}

json nodefail(int k_failed, std::vector<NodeId> wet_nodes) {
    if (k_failed < 0 || k_failed > 4) {
        throw ConfigError("nodefail presets switch off 0..4 of the 5 nodes");
    }
    json doc = base_config("nodefail-" + std::to_string(k_failed), 30000);
    doc["links"] = {{"mode", "full_mesh"}, {"loss", 0.05}, {"latency_ms", 2}};
    json script = json::array();
    // Highest-numbered nodes go dark before the stimulus.
    for (int i = 0; i < k_failed; ++i) {
        script.push_back({{"t_ms", 2000}, {"action", "node_off"}, {"node", 5 - i}});
    }
    if (wet_nodes.empty()) {
        for (NodeId n = 1; n <= 5; ++n) {
            wet_nodes.push_back(n);
        }
    }
    for (NodeId n : wet_nodes) {
        script.push_back({{"t_ms", 12000}, {"action", "water_present"}, {"node", n}});
    }
    doc["script"] = script;
    return doc;
}

std::vector<std::string> sim_preset_names() {
    return {"fire-oven",
            "gas-oven",
            "water-dishwasher",
            "earthquake-massdrop",
            "intrusion-case-i",
            "intrusion-case-ii",
            "intrusion-case-iii",
            "intrusion-case-iv",
            "intrusion-case-v",
            "intrusion-case-vi",
            "nodefail-1",
            "nodefail-2",
            "nodefail-3",
            "nodefail-4"};
}

std::optional<json> sim_preset(const std::string& name) {
    if (name == "fire-oven") {
        return fire_oven(5);
    }
    if (name == "gas-oven") {
        return gas_oven(5);
    }
    if (name == "water-dishwasher") {
        return water_dishwasher(1);
    }
    if (name == "earthquake-massdrop") {
        return earthquake_massdrop(5);
    }
    static const std::map<std::string, int> roman{{"i", 1},  {"ii", 2}, {"iii", 3},
                                                  {"iv", 4}, {"v", 5},  {"vi", 6}};
    const std::string intrusion_prefix = "intrusion-case-";
    if (name.rfind(intrusion_prefix, 0) == 0) {
        auto it = roman.find(name.substr(intrusion_prefix.size()));
        if (it != roman.end()) {
            json doc = intrusion_case(it->second);
            doc["name"] = name;
            return doc;
        }
        return std::nullopt;
    }
    const std::string nodefail_prefix = "nodefail-";
    if (name.rfind(nodefail_prefix, 0) == 0) {
        const std::string suffix = name.substr(nodefail_prefix.size());
        if (suffix.size() == 1 && suffix[0] >= '0' && suffix[0] <= '4') {
            return nodefail(suffix[0] - '0');
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::vector<std::string> range_preset_names() {
    return {"range-i", "range-ii", "range-iii", "range-iv", "range-v"};
}

std::optional<sim::RangeSpec> range_preset(const std::string& name, std::uint64_t seed,
                                           int loops, int messages, SimTime gap_ms) {
    sim::RangeSpec spec;
    spec.seed = seed;
    spec.loops = loops;
    spec.messages_per_loop = messages;
    spec.gap_ms = gap_ms;

    auto two_nodes = [&](double loss, const std::string& room_a, const std::string& room_b) {
        spec.topology = sim::Topology::full_mesh(
            {{1, room_a, 1.0}, {2, room_b, 1.0}}, {loss, 2});
        spec.transmitters = {1};
        spec.receivers = {2};
    };
    if (name == "range-i") {
        // Same room, four meters apart: lossless.
        two_nodes(0.0, "same_room", "same_room");
        return spec;
    }
    if (name == "range-ii") {
        // Six meters, one wall.
        two_nodes(0.0, "room_a", "room_b");
        return spec;
    }
    if (name == "range-iii") {
        // Twelve meters, three walls, two doors.
        two_nodes(0.0, "hallway", "far_room");
        return spec;
    }
    if (name == "range-iv") {
        // Basement transmitter two floors below: massive walls cost 4.3%.
        two_nodes(0.043, "basement", "second_floor");
        return spec;
    }
    if (name == "range-v") {
        // Four concurrent transmitters, one receiver.
        spec.topology = sim::Topology::full_mesh({{1, "center", 1.0},
                                                  {2, "room2", 1.0},
                                                  {3, "room3", 1.0},
                                                  {4, "room4", 1.0},
                                                  {5, "room5", 1.0}},
                                                 {0.0, 2});
        spec.transmitters = {2, 3, 4, 5};
        spec.receivers = {1};
        return spec;
    }
    return std::nullopt;
}

}  // namespace sentinel::cli::presets
