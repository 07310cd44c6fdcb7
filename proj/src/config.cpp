#include "sentinel/config.hpp"

#include <fstream>
#include <set>

namespace sentinel::cli {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        if (allowed.count(key) == 0) {
            throw ConfigError("unknown key '" + (context.empty() ? key : context + "." + key) +
                              "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for key '" + key + "'");
    }
}

std::vector<NodeId> node_list(const json& j, const std::string& key) {
    std::vector<NodeId> out;
    if (!j.contains(key)) {
        return out;
    }
    if (!j.at(key).is_array()) {
        throw ConfigError("'" + key + "' must be an array of node ids");
    }
    for (const auto& v : j.at(key)) {
        out.push_back(v.get<NodeId>());
    }
    return out;
}

ProtocolConfig parse_protocol(const json& obj, const ProtocolConfig& base,
                              const std::string& context) {
    reject_unknown_keys(obj,
                        {"vote_timeout_ms", "retransmit_interval_ms", "idle_listen_ms",
                         "setup_ms", "sleep_interval_ms", "sample_count", "sample_window_ms",
                         "strict_majority", "rebalance", "majority"},
                        context);
    ProtocolConfig out = base;
    out.vote_timeout_ms = get_or<SimTime>(obj, "vote_timeout_ms", base.vote_timeout_ms);
    out.retransmit_interval_ms =
        get_or<SimTime>(obj, "retransmit_interval_ms", base.retransmit_interval_ms);
    out.idle_listen_ms = get_or<SimTime>(obj, "idle_listen_ms", base.idle_listen_ms);
    out.setup_ms = get_or<SimTime>(obj, "setup_ms", base.setup_ms);
    out.sleep_interval_ms = get_or<SimTime>(obj, "sleep_interval_ms", base.sleep_interval_ms);
    out.sample_count = get_or<std::uint32_t>(obj, "sample_count", base.sample_count);
    out.sample_window_ms = get_or<SimTime>(obj, "sample_window_ms", base.sample_window_ms);
    out.strict_majority = get_or<bool>(obj, "strict_majority", base.strict_majority);
    out.rebalance = get_or<bool>(obj, "rebalance", base.rebalance);
    if (obj.contains("majority")) {
        const json& maj = obj.at("majority");
        reject_unknown_keys(maj, {"fire", "gas_leak", "water_leak", "earthquake", "intrusion"},
                            context + ".majority");
        for (std::size_t i = 0; i < kScenarioCount; ++i) {
            const auto s = static_cast<Scenario>(i);
            out.required_majority[i] =
                get_or<float>(maj, scenario_name(s), out.required_majority[i]);
        }
    }
    return out;
}

sim::ScriptAction parse_script_action(const json& obj, std::size_t index) {
    const std::string context = "script." + std::to_string(index);
    if (!obj.contains("action") || !obj.contains("t_ms")) {
        throw ConfigError(context + " needs 't_ms' and 'action'");
    }
    sim::ScriptAction out;
    out.t_ms = obj.at("t_ms").get<SimTime>();
    const std::string action = obj.at("action").get<std::string>();
    if (action == "fire_start") {
        reject_unknown_keys(obj,
                            {"t_ms", "action", "nodes", "delay_s", "rise_s", "co_amp", "odor_amp",
                             "temp_rise_c", "temp_ramp_s"},
                            context);
        sim::FireStart body;
        body.nodes = node_list(obj, "nodes");
        body.params.delay_s = get_or<double>(obj, "delay_s", body.params.delay_s);
        body.params.rise_s = get_or<double>(obj, "rise_s", body.params.rise_s);
        body.params.co_amp = get_or<double>(obj, "co_amp", body.params.co_amp);
        body.params.odor_amp = get_or<double>(obj, "odor_amp", body.params.odor_amp);
        body.params.temp_rise_c = get_or<double>(obj, "temp_rise_c", body.params.temp_rise_c);
        body.params.temp_ramp_s = get_or<double>(obj, "temp_ramp_s", body.params.temp_ramp_s);
        out.body = body;
    } else if (action == "gas_release") {
        reject_unknown_keys(obj, {"t_ms", "action", "nodes", "delay_s", "rise_s", "odor_amp",
                                  "co_amp"},
                            context);
        sim::GasRelease body;
        body.nodes = node_list(obj, "nodes");
        body.params.delay_s = get_or<double>(obj, "delay_s", body.params.delay_s);
        body.params.rise_s = get_or<double>(obj, "rise_s", body.params.rise_s);
        body.params.odor_amp = get_or<double>(obj, "odor_amp", body.params.odor_amp);
        body.params.co_amp = get_or<double>(obj, "co_amp", body.params.co_amp);
        out.body = body;
    } else if (action == "water_present") {
        reject_unknown_keys(obj, {"t_ms", "action", "node", "present"}, context);
        sim::WaterPresent body;
        body.node = get_or<NodeId>(obj, "node", 0);
        body.present = get_or<bool>(obj, "present", true);
        out.body = body;
    } else if (action == "mass_drop") {
        reject_unknown_keys(
            obj, {"t_ms", "action", "nodes", "duration_s", "peak_g", "xy_peak_g", "freq_hz"},
            context);
        sim::MassDrop body;
        body.nodes = node_list(obj, "nodes");
        body.params.duration_s = get_or<double>(obj, "duration_s", body.params.duration_s);
        body.params.peak_g = get_or<double>(obj, "peak_g", body.params.peak_g);
        body.params.xy_peak_g = get_or<double>(obj, "xy_peak_g", body.params.xy_peak_g);
        body.params.freq_hz = get_or<double>(obj, "freq_hz", body.params.freq_hz);
        out.body = body;
    } else if (action == "motion") {
        reject_unknown_keys(obj, {"t_ms", "action", "node", "duration_ms"}, context);
        sim::Motion body;
        body.node = get_or<NodeId>(obj, "node", 0);
        body.duration_ms = get_or<SimTime>(obj, "duration_ms", body.duration_ms);
        out.body = body;
    } else if (action == "door") {
        reject_unknown_keys(obj, {"t_ms", "action", "node", "open"}, context);
        sim::DoorState body;
        body.node = get_or<NodeId>(obj, "node", 0);
        body.open = get_or<bool>(obj, "open", true);
        out.body = body;
    } else if (action == "node_off") {
        reject_unknown_keys(obj, {"t_ms", "action", "node"}, context);
        out.body = sim::NodeOff{get_or<NodeId>(obj, "node", 0)};
    } else if (action == "node_on") {
        reject_unknown_keys(obj, {"t_ms", "action", "node"}, context);
        out.body = sim::NodeOn{get_or<NodeId>(obj, "node", 0)};
    } else if (action == "arm_intrusion") {
        reject_unknown_keys(obj, {"t_ms", "action", "armed"}, context);
        out.body = sim::ArmIntrusion{get_or<bool>(obj, "armed", true)};
    } else {
        throw ConfigError(context + ": unknown action '" + action + "'");
    }
    return out;
}

detect::SensorKind parse_sensor(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(detect::SensorKind::Hall); ++i) {
        const auto kind = static_cast<detect::SensorKind>(i);
        if (name == detect::sensor_name(kind)) {
            return kind;
        }
    }
    throw ConfigError("unknown sensor '" + name + "'");
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    reject_unknown_keys(doc,
                        {"name", "seed", "end_time_ms", "detect_interval_ms", "ulp_interval_ms",
                         "retrigger_holdoff_ms", "armed_at_start", "nodes", "links", "protocol",
                         "protocol_overrides", "thresholds", "profile", "noise", "environment",
                         "script", "traces"},
                        "");
    RunConfig out;
    out.raw = doc;
    out.name = get_or<std::string>(doc, "name", "custom");
    sim::SimulationConfig& sc = out.sim;
    sc.seed = get_or<std::uint64_t>(doc, "seed", sc.seed);
    sc.end_time_ms = get_or<SimTime>(doc, "end_time_ms", sc.end_time_ms);
    sc.detect_interval_ms = get_or<SimTime>(doc, "detect_interval_ms", sc.detect_interval_ms);
    sc.ulp_interval_ms = get_or<SimTime>(doc, "ulp_interval_ms", sc.ulp_interval_ms);
    sc.retrigger_holdoff_ms =
        get_or<SimTime>(doc, "retrigger_holdoff_ms", sc.retrigger_holdoff_ms);
    sc.armed_at_start = get_or<bool>(doc, "armed_at_start", sc.armed_at_start);

    if (!doc.contains("nodes") || !doc.at("nodes").is_array() || doc.at("nodes").empty()) {
        throw ConfigError("'nodes' must be a non-empty array");
    }
    std::vector<sim::NodeSpec> nodes;
    for (const auto& n : doc.at("nodes")) {
        reject_unknown_keys(n, {"id", "room", "weight"}, "nodes[]");
        if (!n.contains("id")) {
            throw ConfigError("every node needs an 'id'");
        }
        sim::NodeSpec spec;
        spec.id = n.at("id").get<NodeId>();
        spec.room = get_or<std::string>(n, "room", "");
        spec.weight = get_or<double>(n, "weight", 1.0);
        nodes.push_back(std::move(spec));
    }

    if (!doc.contains("links")) {
        throw ConfigError("'links' is required");
    }
    const json& links = doc.at("links");
    reject_unknown_keys(links, {"mode", "loss", "latency_ms", "items"}, "links");
    const std::string mode = get_or<std::string>(links, "mode", "full_mesh");
    if (mode == "full_mesh") {
        sim::LinkModel link;
        link.loss_prob = get_or<double>(links, "loss", 0.0);
        link.latency_ms = get_or<SimTime>(links, "latency_ms", 2);
        try {
            sc.topology = sim::Topology::full_mesh(nodes, link);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (mode == "list") {
        try {
            sim::Topology topo;
            for (const auto& n : nodes) {
                topo.add_node(n);
            }
            if (!links.contains("items") || !links.at("items").is_array()) {
                throw ConfigError("links.items must be an array");
            }
            for (const auto& item : links.at("items")) {
                reject_unknown_keys(item, {"a", "b", "loss", "latency_ms"}, "links.items[]");
                sim::LinkModel link;
                link.loss_prob = get_or<double>(item, "loss", 0.0);
                link.latency_ms = get_or<SimTime>(item, "latency_ms", 2);
                topo.add_link(item.at("a").get<NodeId>(), item.at("b").get<NodeId>(), link);
            }
            sc.topology = std::move(topo);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("links.mode must be 'full_mesh' or 'list'");
    }

    if (doc.contains("protocol")) {
        sc.protocol = parse_protocol(doc.at("protocol"), ProtocolConfig{}, "protocol");
    }
    if (doc.contains("protocol_overrides")) {
        for (const auto& [key, value] : doc.at("protocol_overrides").items()) {
            NodeId id = 0;
            try {
                id = static_cast<NodeId>(std::stoul(key));
            } catch (const std::exception&) {
                throw ConfigError("protocol_overrides keys must be node ids, got '" + key + "'");
            }
            sc.protocol_overrides[id] =
                parse_protocol(value, sc.protocol, "protocol_overrides." + key);
        }
    }

    if (doc.contains("thresholds")) {
        const json& th = doc.at("thresholds");
        reject_unknown_keys(th,
                            {"co_above_baseline", "odor_above_baseline", "temp_gradient_c_per_s",
                             "gradient_interval_s", "accel_g"},
                            "thresholds");
        sc.thresholds.co_above_baseline =
            get_or<float>(th, "co_above_baseline", sc.thresholds.co_above_baseline);
        sc.thresholds.odor_above_baseline =
            get_or<float>(th, "odor_above_baseline", sc.thresholds.odor_above_baseline);
        sc.thresholds.temp_gradient_c_per_s =
            get_or<float>(th, "temp_gradient_c_per_s", sc.thresholds.temp_gradient_c_per_s);
        sc.thresholds.gradient_interval_s =
            get_or<float>(th, "gradient_interval_s", sc.thresholds.gradient_interval_s);
        sc.thresholds.accel_g = get_or<float>(th, "accel_g", sc.thresholds.accel_g);
    }

    if (doc.contains("profile")) {
        const json& p = doc.at("profile");
        reject_unknown_keys(p,
                            {"setup_mW", "setup_s", "wifi_peak_mW", "peak_s", "listen_mW",
                             "listen_s", "active_mW", "sleep_mW"},
                            "profile");
        sc.profile.setup_mW = get_or<double>(p, "setup_mW", sc.profile.setup_mW);
        sc.profile.setup_s = get_or<double>(p, "setup_s", sc.profile.setup_s);
        sc.profile.wifi_peak_mW = get_or<double>(p, "wifi_peak_mW", sc.profile.wifi_peak_mW);
        sc.profile.peak_s = get_or<double>(p, "peak_s", sc.profile.peak_s);
        sc.profile.listen_mW = get_or<double>(p, "listen_mW", sc.profile.listen_mW);
        sc.profile.listen_s = get_or<double>(p, "listen_s", sc.profile.listen_s);
        sc.profile.active_mW = get_or<double>(p, "active_mW", sc.profile.active_mW);
        sc.profile.sleep_mW = get_or<double>(p, "sleep_mW", sc.profile.sleep_mW);
    }

    if (doc.contains("noise")) {
        const json& n = doc.at("noise");
        reject_unknown_keys(n, {"gas_sigma", "temp_sigma", "accel_sigma"}, "noise");
        sc.noise.gas_sigma = get_or<double>(n, "gas_sigma", 0.0);
        sc.noise.temp_sigma = get_or<double>(n, "temp_sigma", 0.0);
        sc.noise.accel_sigma = get_or<double>(n, "accel_sigma", 0.0);
    }

    if (doc.contains("environment")) {
        const json& e = doc.at("environment");
        reject_unknown_keys(e, {"co_base", "odor_base", "temp_base_c"}, "environment");
        sc.co_base = get_or<double>(e, "co_base", sc.co_base);
        sc.odor_base = get_or<double>(e, "odor_base", sc.odor_base);
        sc.temp_base_c = get_or<double>(e, "temp_base_c", sc.temp_base_c);
    }

    if (doc.contains("script")) {
        if (!doc.at("script").is_array()) {
            throw ConfigError("'script' must be an array");
        }
        std::size_t index = 0;
        for (const auto& a : doc.at("script")) {
            sc.script.push_back(parse_script_action(a, index));
            ++index;
        }
    }

    if (doc.contains("traces")) {
        for (const auto& t : doc.at("traces")) {
            reject_unknown_keys(t, {"file", "column", "sensor", "nodes", "align_at_ms"},
                                "traces[]");
            sim::TraceBindingSpec spec;
            spec.file = get_or<std::string>(t, "file", "");
            spec.column = get_or<std::string>(t, "column", "");
            spec.sensor = parse_sensor(get_or<std::string>(t, "sensor", "co"));
            spec.nodes = node_list(t, "nodes");
            spec.align_at_ms = get_or<SimTime>(t, "align_at_ms", 0);
            if (spec.file.empty() || spec.column.empty()) {
                throw ConfigError("traces[] entries need 'file' and 'column'");
            }
            sc.traces.push_back(std::move(spec));
        }
    }

    try {
        sc.validate();
    } catch (const sim::ConfigInvalid& e) {
        throw ConfigError(e.what());
    }
    return out;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot open config file: " + file.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key.path=value, got '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::exception&) {
        value = value_text;  // plain string
    }

    json* cursor = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string segment = path.substr(start, dot - start);
        if (segment.empty()) {
            throw ConfigError("override path has an empty segment: '" + path + "'");
        }
        const bool is_index = cursor->is_array() ||
                              (segment.find_first_not_of("0123456789") == std::string::npos &&
                               cursor->is_null());
        const bool last = dot == std::string::npos;
        if (is_index) {
            std::size_t index = 0;
            try {
                index = std::stoul(segment);
            } catch (const std::exception&) {
                throw ConfigError("array index expected in override path '" + path + "'");
            }
            if (!cursor->is_array() || index >= cursor->size()) {
                throw ConfigError("override index out of range in '" + path + "'");
            }
            cursor = &(*cursor)[index];
        } else {
            cursor = &(*cursor)[segment];
        }
        if (last) {
            *cursor = value;
            return;
        }
        start = dot + 1;
    }
}

}  // namespace sentinel::cli
