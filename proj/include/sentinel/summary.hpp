#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/sim.hpp"

namespace sentinel::cli {

struct ScenarioOutcome {
    bool truth_present = false;          // from the stimulus script
    bool accepted = false;               // any accepted session in the run
    std::optional<SimTime> stimulus_ms;  // first triggering action
    std::optional<SimTime> first_accept_ms;
    std::optional<SimTime> detection_latency_ms;
    bool false_positive = false;
    bool false_negative = false;
};

struct NodeEnergySummary {
    double total_mJ = 0.0;
    double average_mW = 0.0;
    std::map<std::string, double> stage_mJ;
};

struct RunSummary {
    std::string name;
    std::uint64_t seed = 0;
    SimTime end_time_ms = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_delivered = 0;
    std::map<std::string, std::uint64_t> messages_dropped;
    std::size_t sessions_decided = 0;  // locally tallied decisions
    std::size_t sessions_accepted = 0;
    std::array<ScenarioOutcome, kScenarioCount> scenarios;
    std::map<NodeId, NodeEnergySummary> energy;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

// Script-derived ground truth plus outcome accounting for one run.
RunSummary summarize(const sim::RunResult& result, const sim::StimulusScript& script,
                     const std::string& name);

// Runs the config once with its configured seed.
std::pair<sim::RunResult, RunSummary> run_once(const RunConfig& cfg);

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    double ci95_half = 0.0;
    std::size_t n = 0;
};

struct ReplicateResult {
    std::vector<RunSummary> per_seed;  // ordered by the seeds argument
    std::map<std::string, Aggregate> metrics;

    std::string to_table() const;
};

// Replays the config across seeds. Runs fan out over a small worker pool;
// outputs merge deterministically in seed order.
ReplicateResult replicate(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds);

}  // namespace sentinel::cli
