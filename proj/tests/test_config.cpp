#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sentinel/config.hpp"
#include "sentinel/presets.hpp"
#include "sentinel/summary.hpp"

using namespace sentinel;
using namespace sentinel::cli;

namespace {

nlohmann::json minimal_config() {
    return nlohmann::json{
        {"nodes", nlohmann::json::array({{{"id", 1}}, {{"id", 2}}})},
        {"links", {{"mode", "full_mesh"}}},
    };
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const RunConfig cfg = parse_run_config(minimal_config());
    CHECK(cfg.sim.topology.nodes().size() == 2);
    CHECK(cfg.sim.protocol.vote_timeout_ms == 2000);
    CHECK(cfg.sim.end_time_ms == 60000);
    CHECK(cfg.sim.topology.link(1, 2).latency_ms == 2);
}

TEST_CASE("unknown keys are rejected by name") {
    auto doc = minimal_config();
    doc["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(parse_run_config(doc), "unknown key 'typo_key'", ConfigError);

    doc = minimal_config();
    doc["protocol"] = {{"vote_timeout", 100}};
    CHECK_THROWS_WITH_AS(parse_run_config(doc), "unknown key 'protocol.vote_timeout'",
                         ConfigError);

    doc = minimal_config();
    doc["thresholds"] = {{"accel", 1.0}};
    CHECK_THROWS_WITH_AS(parse_run_config(doc), "unknown key 'thresholds.accel'", ConfigError);

    doc = minimal_config();
    doc["script"] = nlohmann::json::array({{{"t_ms", 0}, {"action", "sharknado"}}});
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("invalid values are rejected") {
    auto doc = minimal_config();
    doc["protocol"] = {{"retransmit_interval_ms", 5000}};  // >= timeout
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

    doc = minimal_config();
    doc["nodes"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

    doc = minimal_config();
    doc["links"] = {{"mode", "ring"}};
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

    doc = minimal_config();
    doc["links"] = {{"mode", "full_mesh"}, {"loss", 1.5}};
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

    doc = minimal_config();
    doc["end_time_ms"] = 0;
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("overrides rewrite nested keys and array elements") {
    auto doc = presets::fire_oven(5);
    apply_override(doc, "protocol.vote_timeout_ms=900");
    apply_override(doc, "script.0.nodes=[1,2]");
    apply_override(doc, "seed=99");
    apply_override(doc, "name=renamed");
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.sim.protocol.vote_timeout_ms == 900);
    CHECK(cfg.sim.seed == 99);
    CHECK(cfg.name == "renamed");
    const auto& fire = std::get<sim::FireStart>(cfg.sim.script.at(0).body);
    CHECK(fire.nodes == std::vector<NodeId>{1, 2});

    CHECK_THROWS_AS(apply_override(doc, "script.9.nodes=[1]"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
    // Overrides may introduce keys, but the schema still rejects them.
    apply_override(doc, "protocol.bogus=1");
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("per-node protocol overrides parse") {
    auto doc = minimal_config();
    doc["protocol"] = {{"idle_listen_ms", 9000}};
    doc["protocol_overrides"] = {{"2", {{"idle_listen_ms", 4000}}}};
    const RunConfig cfg = parse_run_config(doc);
    REQUIRE(cfg.sim.protocol_overrides.count(2) == 1);
    CHECK(cfg.sim.protocol_overrides.at(2).idle_listen_ms == 4000);
    CHECK(cfg.sim.protocol.idle_listen_ms == 9000);

    doc["protocol_overrides"] = {{"banana", {{"idle_listen_ms", 4000}}}};
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("config files load from disk") {
    const auto path = std::filesystem::temp_directory_path() / "sentinel_cfg.json";
    {
        std::ofstream out(path);
        out << minimal_config().dump();
    }
    const RunConfig cfg = load_run_config(path);
    CHECK(cfg.sim.topology.nodes().size() == 2);

    CHECK_THROWS_AS(load_run_config("/nonexistent/path.json"), ConfigError);
    const auto broken = std::filesystem::temp_directory_path() / "sentinel_broken.json";
    {
        std::ofstream out(broken);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_run_config(broken), ConfigError);
}

TEST_CASE("replication aggregates deterministically") {
    // A loss-free scenario draws nothing from the seed: zero variance.
    auto cfg = parse_run_config(presets::water_dishwasher(1));
    const auto result = cli::replicate(cfg, {1, 2, 3, 4});
    CHECK(result.per_seed.size() == 4);
    CHECK(result.metrics.at("network_accept").mean == doctest::Approx(1.0));
    CHECK(result.metrics.at("network_accept").stddev == doctest::Approx(0.0));
    CHECK(result.metrics.at("messages_sent").stddev == doctest::Approx(0.0));
    CHECK(result.metrics.at("delivery_rate").mean == doctest::Approx(1.0));

    // Repeated identical seeds agree with each other even under loss.
    auto lossy = parse_run_config(presets::nodefail(1));
    const auto repeated = cli::replicate(lossy, {9, 9, 9});
    CHECK(repeated.metrics.at("messages_sent").stddev == doctest::Approx(0.0));
    CHECK(repeated.per_seed[0].messages_delivered == repeated.per_seed[2].messages_delivered);

    CHECK_THROWS_AS(cli::replicate(cfg, {}), ConfigError);
}

TEST_CASE("every named preset parses and serializes to its frozen form") {
    const std::filesystem::path dir = std::filesystem::path(SENTINEL_GOLDEN_DIR);
    for (const auto& name : presets::sim_preset_names()) {
        CAPTURE(name);
        const auto doc = presets::sim_preset(name);
        REQUIRE(doc.has_value());
        // Valid per the schema.
        const RunConfig cfg = parse_run_config(*doc);
        CHECK(cfg.name == name);
        // Stable serialized form.
        const std::string frozen = read_file(dir / (name + ".json"));
        CHECK(doc->dump(2) + "\n" == frozen);
    }
    CHECK_FALSE(presets::sim_preset("no-such-preset").has_value());
    CHECK_FALSE(presets::sim_preset("intrusion-case-vii").has_value());
    CHECK_FALSE(presets::sim_preset("nodefail-9").has_value());

    for (const auto& name : presets::range_preset_names()) {
        CAPTURE(name);
        CHECK(presets::range_preset(name, 1, 50, 1000, 10).has_value());
    }
    CHECK_FALSE(presets::range_preset("range-vi", 1, 50, 1000, 10).has_value());
}
