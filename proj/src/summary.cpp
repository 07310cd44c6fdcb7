#include "sentinel/summary.hpp"

#include <cmath>
#include <future>
#include <set>
#include <sstream>
#include <thread>

namespace sentinel::cli {

namespace {

// Ground truth per scenario as scripted. Intrusion counts as present only
// when at least two nodes show anomalies, mirroring the acceptance rule
// the detection network is expected to apply.
struct GroundTruth {
    std::array<std::optional<SimTime>, kScenarioCount> first_stimulus;
};

GroundTruth derive_truth(const sim::StimulusScript& script) {
    GroundTruth truth;
    std::set<NodeId> intrusion_nodes;
    std::optional<SimTime> first_anomaly;
    auto mark = [&](Scenario s, SimTime t) {
        auto& slot = truth.first_stimulus[static_cast<std::size_t>(s)];
        if (!slot || t < *slot) {
            slot = t;
        }
    };
    for (const auto& action : script) {
        std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, sim::FireStart>) {
                    if (!body.nodes.empty()) {
                        mark(Scenario::Fire, action.t_ms);
                    }
                } else if constexpr (std::is_same_v<T, sim::GasRelease>) {
                    if (!body.nodes.empty()) {
                        mark(Scenario::GasLeak, action.t_ms);
                    }
                } else if constexpr (std::is_same_v<T, sim::WaterPresent>) {
                    if (body.present) {
                        mark(Scenario::WaterLeak, action.t_ms);
                    }
                } else if constexpr (std::is_same_v<T, sim::MassDrop>) {
                    if (!body.nodes.empty()) {
                        mark(Scenario::Earthquake, action.t_ms);
                    }
                } else if constexpr (std::is_same_v<T, sim::Motion>) {
                    intrusion_nodes.insert(body.node);
                    if (!first_anomaly) {
                        first_anomaly = action.t_ms;
                    }
                } else if constexpr (std::is_same_v<T, sim::DoorState>) {
                    if (body.open) {
                        intrusion_nodes.insert(body.node);
                        if (!first_anomaly) {
                            first_anomaly = action.t_ms;
                        }
                    }
                }
            },
            action.body);
    }
    if (intrusion_nodes.size() >= 2 && first_anomaly) {
        mark(Scenario::Intrusion, *first_anomaly);
    }
    return truth;
}

}  // namespace

RunSummary summarize(const sim::RunResult& result, const sim::StimulusScript& script,
                     const std::string& name) {
    RunSummary s;
    s.name = name;
    s.seed = result.seed;
    s.end_time_ms = result.end_time_ms;
    s.messages_sent = result.messages.sent;
    s.messages_delivered = result.messages.delivered;
    s.messages_dropped = result.messages.dropped;
    for (const auto& d : result.decisions) {
        if (d.local) {
            s.sessions_decided += 1;
            if (d.accepted) {
                s.sessions_accepted += 1;
            }
        }
    }
    const GroundTruth truth = derive_truth(script);
    for (std::size_t i = 0; i < kScenarioCount; ++i) {
        const auto scenario = static_cast<Scenario>(i);
        ScenarioOutcome& out = s.scenarios[i];
        out.stimulus_ms = truth.first_stimulus[i];
        out.truth_present = out.stimulus_ms.has_value();
        out.accepted = result.network_accepted(scenario);
        out.first_accept_ms = result.first_accept_time(scenario);
        if (out.truth_present && out.first_accept_ms) {
            out.detection_latency_ms = *out.first_accept_ms - *out.stimulus_ms;
        }
        out.false_positive = out.accepted && !out.truth_present;
        out.false_negative = !out.accepted && out.truth_present;
    }
    for (const auto& [node, ledger] : result.energy) {
        NodeEnergySummary e;
        e.total_mJ = ledger.total_mJ();
        e.average_mW = ledger.average_mW();
        for (std::size_t i = 0; i < power::kStageCount; ++i) {
            const auto stage = static_cast<power::Stage>(i);
            e.stage_mJ[power::stage_name(stage)] = ledger.stage_mJ(stage);
        }
        s.energy[node] = e;
    }
    return s;
}

nlohmann::json RunSummary::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["seed"] = seed;
    j["end_time_ms"] = end_time_ms;
    j["messages"] = {{"sent", messages_sent},
                     {"delivered", messages_delivered},
                     {"dropped", messages_dropped}};
    j["sessions"] = {{"decided", sessions_decided}, {"accepted", sessions_accepted}};
    nlohmann::json sc;
    for (std::size_t i = 0; i < kScenarioCount; ++i) {
        const auto& o = scenarios[i];
        nlohmann::json e;
        e["truth_present"] = o.truth_present;
        e["accepted"] = o.accepted;
        e["false_positive"] = o.false_positive;
        e["false_negative"] = o.false_negative;
        if (o.detection_latency_ms) {
            e["detection_latency_ms"] = *o.detection_latency_ms;
        }
        sc[scenario_name(static_cast<Scenario>(i))] = e;
    }
    j["scenarios"] = sc;
    nlohmann::json en;
    for (const auto& [node, e] : energy) {
        en[std::to_string(node)] = {{"total_mJ", e.total_mJ},
                                    {"average_mW", e.average_mW},
                                    {"stage_mJ", e.stage_mJ}};
    }
    j["energy"] = en;
    return j;
}

std::string RunSummary::to_table() const {
    std::ostringstream os;
    os << "run: " << name << "  seed: " << seed << "  duration: " << end_time_ms << " ms\n";
    os << "messages: sent " << messages_sent << ", delivered " << messages_delivered
       << ", dropped";
    if (messages_dropped.empty()) {
        os << " 0";
    } else {
        bool first = true;
        for (const auto& [reason, n] : messages_dropped) {
            os << (first ? " " : ", ") << reason << "=" << n;
            first = false;
        }
    }
    os << "\n";
    os << "sessions: decided " << sessions_decided << ", accepted " << sessions_accepted << "\n";
    for (std::size_t i = 0; i < kScenarioCount; ++i) {
        const auto& o = scenarios[i];
        if (!o.truth_present && !o.accepted) {
            continue;
        }
        os << "  " << scenario_name(static_cast<Scenario>(i)) << ": "
           << (o.accepted ? "ACCEPTED" : "not accepted");
        if (o.detection_latency_ms) {
            os << " after " << *o.detection_latency_ms << " ms";
        }
        if (o.false_positive) {
            os << " [false positive]";
        }
        if (o.false_negative) {
            os << " [missed]";
        }
        os << "\n";
    }
    for (const auto& [node, e] : energy) {
        os << "  node " << node << ": " << e.total_mJ << " mJ, avg " << e.average_mW << " mW\n";
    }
    return os.str();
}

std::pair<sim::RunResult, RunSummary> run_once(const RunConfig& cfg) {
    sim::RunResult result = sim::run(cfg.sim);
    RunSummary summary = summarize(result, cfg.sim.script, cfg.name);
    return {std::move(result), std::move(summary)};
}

namespace {

Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate a;
    a.n = values.size();
    if (values.empty()) {
        return a;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - a.mean) * (v - a.mean);
        }
        a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        a.ci95_half = 1.96 * a.stddev / std::sqrt(static_cast<double>(values.size()));
    }
    return a;
}

}  // namespace

ReplicateResult replicate(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) {
        throw ConfigError("replication needs at least one seed");
    }
    ReplicateResult out;
    out.per_seed.resize(seeds.size());

    const std::size_t workers =
        std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::size_t next = 0;
    while (next < seeds.size()) {
        std::vector<std::pair<std::size_t, std::future<RunSummary>>> batch;
        for (std::size_t w = 0; w < workers && next < seeds.size(); ++w, ++next) {
            const std::size_t index = next;
            batch.emplace_back(index, std::async(std::launch::async, [&cfg, &seeds, index] {
                                   RunConfig local = cfg;
                                   local.sim.seed = seeds[index];
                                   return run_once(local).second;
                               }));
        }
        for (auto& [index, fut] : batch) {
            out.per_seed[index] = fut.get();
        }
    }

    std::vector<double> delivery_rate;
    std::vector<double> sent;
    std::vector<double> accepted_sessions;
    std::vector<double> network_accepts;
    std::vector<double> latency;
    for (const auto& s : out.per_seed) {
        sent.push_back(static_cast<double>(s.messages_sent));
        if (s.messages_sent > 0) {
            delivery_rate.push_back(static_cast<double>(s.messages_delivered) /
                                    static_cast<double>(s.messages_sent));
        }
        accepted_sessions.push_back(static_cast<double>(s.sessions_accepted));
        double any_accept = 0.0;
        for (const auto& o : s.scenarios) {
            if (o.accepted) {
                any_accept = 1.0;
            }
            if (o.detection_latency_ms) {
                latency.push_back(static_cast<double>(*o.detection_latency_ms));
            }
        }
        network_accepts.push_back(any_accept);
    }
    out.metrics["messages_sent"] = aggregate_of(sent);
    out.metrics["delivery_rate"] = aggregate_of(delivery_rate);
    out.metrics["sessions_accepted"] = aggregate_of(accepted_sessions);
    out.metrics["network_accept"] = aggregate_of(network_accepts);
    out.metrics["detection_latency_ms"] = aggregate_of(latency);
    return out;
}

std::string ReplicateResult::to_table() const {
    std::ostringstream os;
    os << "seeds: " << per_seed.size() << "\n";
    os << "metric                    mean        stddev      ci95+/-     n\n";
    for (const auto& [name, a] : metrics) {
        os << "  ";
        os.width(24);
        os << std::left << name;
        os.width(12);
        os << a.mean;
        os.width(12);
        os << a.stddev;
        os.width(12);
        os << a.ci95_half;
        os << a.n << "\n";
    }
    return os.str();
}

}  // namespace sentinel::cli
