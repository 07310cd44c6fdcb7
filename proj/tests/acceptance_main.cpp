// Acceptance suite: every criterion prints one PASS/FAIL line and the
// binary exits nonzero if any selected criterion fails.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "sentinel/detection.hpp"
#include "sentinel/message.hpp"
#include "sentinel/power.hpp"
#include "sentinel/presets.hpp"
#include "sentinel/protocol.hpp"
#include "sentinel/sim.hpp"
#include "sentinel/summary.hpp"

using namespace sentinel;
namespace presets = sentinel::cli::presets;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool run_accepts(const nlohmann::json& doc, Scenario scenario) {
    auto cfg = cli::parse_run_config(doc);
    return sim::run(cfg.sim).network_accepted(scenario);
}

// --- Criterion 1: fire consensus needs three of five exposed nodes -------

bool c1_fire(std::string& detail) {
    const auto start = Clock::now();
    bool ok = true;
    std::ostringstream os;
    for (int k = 0; k <= 5; ++k) {
        const bool accepted = run_accepts(presets::fire_oven(k), Scenario::Fire);
        const bool expected = k >= 3;
        if (accepted != expected) {
            ok = false;
            os << " k=" << k << " got " << (accepted ? "accept" : "reject");
        }
    }
    const double secs = elapsed_s(start);
    if (secs >= 1.0) {
        ok = false;
        os << " (too slow: " << secs << " s)";
    }
    detail = "reject for k<=2, accept for k>=3 in " + std::to_string(secs) + " s" + os.str();
    return ok;
}

// --- Criterion 2: weighted water veto -------------------------------------

bool c2_water(std::string& detail) {
    auto cfg = cli::parse_run_config(presets::water_dishwasher(1));
    const auto result = sim::run(cfg.sim);
    bool ok = result.network_accepted(Scenario::WaterLeak);
    double total = -1.0;
    for (const auto& d : result.decisions) {
        if (d.local && d.scenario == Scenario::WaterLeak) {
            total = d.total;
            break;
        }
    }
    ok = ok && total == 2.5;  // exactly one positive voter of weight 2.5

    const bool unit_node_accepted =
        run_accepts(presets::water_dishwasher(2), Scenario::WaterLeak);
    ok = ok && !unit_node_accepted;
    detail = "weighted node alone decides (total " + std::to_string(total) +
             "), unit-weight node alone is rejected";
    return ok;
}

// --- Criterion 3: earthquake unanimity ------------------------------------

bool c3_earthquake(std::string& detail) {
    const bool four = run_accepts(presets::earthquake_massdrop(4), Scenario::Earthquake);
    const bool five = run_accepts(presets::earthquake_massdrop(5), Scenario::Earthquake);
    detail = "4-of-5 positive voters rejected, 5-of-5 accepted";
    return !four && five;
}

// --- Criterion 4: intrusion cases (i)..(vi) --------------------------------

bool c4_intrusion(std::string& detail) {
    struct Expect {
        int case_number;
        bool session_expected;
        bool accept_expected;
    };
    const Expect table[] = {
        {1, false, false}, {2, false, false}, {3, true, true},
        {4, true, false},  {5, true, true},   {6, true, true},
    };
    bool ok = true;
    std::ostringstream os;
    for (const auto& e : table) {
        auto cfg = cli::parse_run_config(presets::intrusion_case(e.case_number));
        const auto result = sim::run(cfg.sim);
        std::size_t sessions = 0;
        for (const auto& d : result.decisions) {
            if (d.local) {
                ++sessions;
            }
        }
        const bool accepted = result.network_accepted(Scenario::Intrusion);
        if ((sessions > 0) != e.session_expected || accepted != e.accept_expected) {
            ok = false;
            os << " case " << e.case_number << ": sessions=" << sessions
               << " accepted=" << accepted;
        }
    }
    detail = "no session for (i)/(ii); accept (iii),(v),(vi); reject (iv)" + os.str();
    return ok;
}

// --- Criterion 5: node-failure rebalancing ---------------------------------

bool c5_nodefail(std::string& detail) {
    int matches = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto three_live = cli::parse_run_config(presets::nodefail(2));
        auto full = cli::parse_run_config(presets::nodefail(0));
        three_live.sim.seed = seed;
        full.sim.seed = seed;
        const bool a = sim::run(three_live.sim).network_accepted(Scenario::WaterLeak);
        const bool b = sim::run(full.sim).network_accepted(Scenario::WaterLeak);
        if (a == b) {
            ++matches;
        }
    }

    // Two live nodes, one positive voter: rebalancing lifts the lone vote
    // to the majority when the comparison is >=, and not when strict.
    auto doc = presets::nodefail(3, {1});
    cli::apply_override(doc, "links.loss=0.0");
    auto cfg = cli::parse_run_config(doc);
    const auto result = sim::run(cfg.sim);
    bool lone_ok = result.network_accepted(Scenario::WaterLeak);
    double total = -1.0;
    for (const auto& d : result.decisions) {
        if (d.local && d.scenario == Scenario::WaterLeak) {
            total = d.total;
            lone_ok = lone_ok && d.rebalanced;
            break;
        }
    }
    lone_ok = lone_ok && total == 2.5;

    cli::apply_override(doc, "protocol.strict_majority=true");
    auto strict_cfg = cli::parse_run_config(doc);
    const bool strict_accepts = sim::run(strict_cfg.sim).network_accepted(Scenario::WaterLeak);

    detail = "3-live matches full network in " + std::to_string(matches) +
             "/100 seeded runs; lone voter rebalances to 2.5 under >=, strict > rejects";
    return matches == 100 && lone_ok && !strict_accepts;
}

// --- Criterion 6: communication range --------------------------------------

bool c6_range(std::string& detail) {
    const auto start = Clock::now();
    bool ok = true;
    std::ostringstream os;
    for (const std::string name : {"range-i", "range-ii", "range-iii"}) {
        auto spec = *presets::range_preset(name, 1, 50, 1000, 10);
        const auto result = sim::range_test(spec);
        if (result.min_received(2, 1) != 1000) {
            ok = false;
            os << " " << name << " lost messages";
        }
    }
    {
        auto spec = *presets::range_preset("range-v", 1, 50, 1000, 10);
        const auto result = sim::range_test(spec);
        for (NodeId tx : {2, 3, 4, 5}) {
            if (result.min_received(1, tx) != 1000) {
                ok = false;
                os << " range-v stream " << tx << " lost messages";
            }
        }
    }
    int in_range = 0;
    const int seeds = 20;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        auto spec = *presets::range_preset("range-iv", seed, 50, 1000, 10);
        const auto result = sim::range_test(spec);
        const double mean = result.mean_received(2, 1);
        if (mean >= 954.0 && mean <= 960.0) {
            ++in_range;
        }
    }
    // At least 95% of seeds must land inside the interval.
    if (in_range < 19) {
        ok = false;
        os << " scenario-iv means in range for only " << in_range << "/" << seeds;
    }
    const double secs = elapsed_s(start);
    if (secs >= 5.0) {
        ok = false;
        os << " (too slow: " << secs << " s)";
    }
    detail = "scenarios i-iii,v lossless at 1000/loop; iv mean in [954,960] for " +
             std::to_string(in_range) + "/" + std::to_string(seeds) + " seeds in " +
             std::to_string(secs) + " s" + os.str();
    return ok;
}

// --- Criterion 7: power model ----------------------------------------------

bool c7_power(std::string& detail) {
    using namespace sentinel::power;
    const std::array<std::pair<double, double>, 3> observed{
        {{10.0, 424.87}, {30.0, 378.00}, {60.0, 327.21}}};
    bool ok = true;
    std::ostringstream os;

    const CycleModel fitted = fit_cycle_model(observed);
    for (const auto& [interval, avg] : observed) {
        const double got = average_power_mW(fitted, interval);
        if (std::fabs(got - avg) / avg > 0.005) {
            ok = false;
            os << " fit off at T=" << interval;
        }
    }

    // Simulated quiet duty cycles against the measured averages.
    for (const auto& [interval, avg] : observed) {
        nlohmann::json doc;
        doc["name"] = "power-cycle";
        doc["seed"] = 1;
        const auto cycle_ms = static_cast<SimTime>(15500 + interval * 1000.0);
        doc["end_time_ms"] = 10 * cycle_ms;
        doc["nodes"] = nlohmann::json::array({{{"id", 1}}, {{"id", 2}}});
        doc["links"] = {{"mode", "full_mesh"}};
        doc["protocol"] = {{"sleep_interval_ms", static_cast<SimTime>(interval * 1000.0)}};
        auto cfg = cli::parse_run_config(doc);
        const auto result = sim::run(cfg.sim);
        const double got = result.energy.at(1).average_mW();
        if (std::fabs(got - avg) / avg > 0.15) {
            ok = false;
            os << " ledger off at T=" << interval << " (" << got << " mW)";
        }
    }

    double prev = average_power_mW(fitted, 1.0);
    for (int t = 2; t <= 600; ++t) {
        const double cur = average_power_mW(fitted, t);
        if (cur >= prev) {
            ok = false;
            os << " not monotone at T=" << t;
            break;
        }
        prev = cur;
    }
    detail = "fit reproduces 424.87/378.00/327.21 within 0.5%, ledger within 15%, "
             "average power monotone over T=1..600" +
             os.str();
    return ok;
}

// --- Criterion 8: protocol property suite ----------------------------------

Message random_message(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind_dist(1, 3);
    std::uniform_int_distribution<std::uint32_t> u16(0, 0xFFFF);
    std::uniform_int_distribution<std::uint32_t> u32;
    std::uniform_int_distribution<int> scen(0, 4);
    std::uniform_real_distribution<float> raw(0.0f, 5000.0f);
    std::uniform_real_distribution<float> weight(0.0f, 10.0f);
    Message m;
    m.kind = static_cast<MsgKind>(kind_dist(rng));
    m.sender = static_cast<NodeId>(u16(rng));
    m.session.initiator = static_cast<NodeId>(u16(rng));
    m.session.seq = u32(rng);
    m.scenario = static_cast<Scenario>(scen(rng));
    if (m.kind == MsgKind::VoteResponse) {
        m.vote = {raw(rng), (rng() & 1) ? 1.0f : 0.0f, weight(rng)};
    } else if (m.kind == MsgKind::VoteNotification) {
        m.decision = (rng() & 1) != 0;
        m.total_weighted_vote = weight(rng);
    }
    return m;
}

sim::SimulationConfig random_sim_config(std::mt19937_64& rng) {
    sim::SimulationConfig cfg;
    std::uniform_int_distribution<int> node_count(2, 10);
    std::uniform_int_distribution<sentinel::SimTime> latency(1, 5);
    const double losses[] = {0.0, 0.05, 0.2};
    const int n = node_count(rng);
    std::vector<sim::NodeSpec> nodes;
    std::uniform_real_distribution<double> weight(0.5, 3.0);
    for (int i = 1; i <= n; ++i) {
        nodes.push_back({static_cast<NodeId>(i), "", weight(rng)});
    }
    cfg.topology = sim::Topology::full_mesh(nodes, {losses[rng() % 3], latency(rng)});
    cfg.protocol.idle_listen_ms = 30000;
    cfg.end_time_ms = 30000;
    cfg.armed_at_start = true;
    cfg.seed = rng();
    std::uniform_int_distribution<sentinel::SimTime> stim_time(11000, 20000);
    std::uniform_int_distribution<int> node_pick(1, n);
    std::vector<sim::ScriptAction> script;
    for (int s = 0, count = 1 + static_cast<int>(rng() % 3); s < count; ++s) {
        const auto node = static_cast<NodeId>(node_pick(rng));
        if (rng() & 1) {
            script.push_back({stim_time(rng), sim::WaterPresent{node, true}});
        } else {
            script.push_back({stim_time(rng), sim::Motion{node, 3000}});
        }
    }
    if (n > 2 && (rng() & 3) == 0) {
        script.push_back({10000, sim::NodeOff{static_cast<NodeId>(node_pick(rng))}});
    }
    std::sort(script.begin(), script.end(),
              [](const sim::ScriptAction& a, const sim::ScriptAction& b) {
                  return a.t_ms < b.t_ms;
              });
    cfg.script = std::move(script);
    return cfg;
}

bool c8_properties(std::string& detail) {
    bool ok = true;
    std::ostringstream os;

    // Codec round-trip over 1e5 randomized messages.
    std::mt19937_64 rng(0xACCE97);
    for (int i = 0; i < 100000; ++i) {
        const Message m = random_message(rng);
        const auto back = decode_message(encode_message(m));
        if (!back || !(*back == m)) {
            ok = false;
            os << " codec mismatch at i=" << i;
            break;
        }
    }

    // Rebalance ratio and sum preservation.
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    for (int trial = 0; trial < 2000 && ok; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 10);
        std::map<NodeId, double> all;
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            all[static_cast<NodeId>(i)] = weight(rng);
            total += all[static_cast<NodeId>(i)];
        }
        std::set<NodeId> responding;
        for (const auto& [node, w] : all) {
            if (responding.empty() || (rng() & 1)) {
                responding.insert(node);
            }
        }
        const auto scaled = rebalance_weights(all, responding);
        double scaled_total = 0.0;
        for (const auto& [node, w] : scaled) {
            scaled_total += w;
        }
        if (std::fabs(scaled_total - total) > 1e-9 * total) {
            ok = false;
            os << " rebalance sum drift";
        }
        for (NodeId a : responding) {
            for (NodeId b : responding) {
                const double before = all.at(a) / all.at(b);
                const double after = scaled.at(a) / scaled.at(b);
                if (std::fabs(after - before) > 1e-9 * std::fabs(before)) {
                    ok = false;
                    os << " rebalance ratio drift";
                }
            }
        }
    }

    // Tally monotonicity: an extra positive vote never flips accept->reject.
    for (int trial = 0; trial < 2000 && ok; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        std::map<NodeId, double> all;
        for (int i = 1; i <= n; ++i) {
            all[static_cast<NodeId>(i)] = weight(rng);
        }
        VotingSession s;
        s.own_vote = {0.0f, (rng() & 1) ? 1.0f : 0.0f, static_cast<float>(all.at(1))};
        for (int i = 2; i <= n; ++i) {
            s.expected.insert(static_cast<NodeId>(i));
        }
        NodeId extra = static_cast<NodeId>(n);
        for (int i = 2; i < n; ++i) {
            if (rng() & 1) {
                const auto id = static_cast<NodeId>(i);
                s.responses[id] = {0.0f, (rng() & 1) ? 1.0f : 0.0f,
                                   static_cast<float>(all.at(id))};
            }
        }
        const bool rebalance = (rng() & 1) != 0;
        const float majority = static_cast<float>(weight(rng) * n / 2.0);
        const auto before = tally(s, all, 1, majority, rebalance, false);
        s.responses[extra] = {0.0f, 1.0f, static_cast<float>(all.at(extra))};
        const auto after = tally(s, all, 1, majority, rebalance, false);
        if (before.accepted && !after.accepted) {
            ok = false;
            os << " tally monotonicity violated";
        }
    }

    // Session single-response, decision agreement, duty legality, and
    // determinism over randomized topologies and seeds.
    std::mt19937_64 gen(0x5EED5);
    for (int trial = 0; trial < 15 && ok; ++trial) {
        const auto cfg = random_sim_config(gen);
        const auto result = sim::run(cfg);
        std::map<std::string, bool> local_decision;
        for (const auto& d : result.decisions) {
            if (d.local && !local_decision.emplace(to_string(d.session), d.accepted).second) {
                ok = false;
                os << " double local decision";
            }
        }
        for (const auto& d : result.decisions) {
            if (!d.local) {
                auto it = local_decision.find(to_string(d.session));
                if (it != local_decision.end() && it->second != d.accepted) {
                    ok = false;
                    os << " decision disagreement";
                }
            }
        }
        std::set<std::pair<std::string, NodeId>> recorded;
        std::map<NodeId, bool> awake;
        for (const auto& r : result.log) {
            if (r.event == "response_recorded") {
                if (!recorded
                         .insert({r.details.at("session").get<std::string>(),
                                  r.details.at("from").get<NodeId>()})
                         .second) {
                    ok = false;
                    os << " duplicate counted response";
                }
            }
            if (!r.node) {
                continue;
            }
            if (r.event == "wake") {
                awake[*r.node] = true;
            } else if (r.event == "sleep" || r.event == "boot" || r.event == "fail") {
                awake[*r.node] = false;
            } else if (r.event == "deliver" && !awake[*r.node]) {
                ok = false;
                os << " delivery to a sleeping node";
            }
        }
        if (sim::run(cfg).log_lines() != result.log_lines()) {
            ok = false;
            os << " nondeterministic run";
        }
    }

    detail = "codec 1e5 round-trips, rebalance/tally properties, session and duty invariants, "
             "double-run determinism" +
             os.str();
    return ok;
}

// --- Criterion 9: trace replay ---------------------------------------------

bool c9_traces(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    const std::string dir = SENTINEL_DATA_DIR;

    // Smoldering fire: threshold crossing lands ~10 s after the 30 s mark.
    auto fire = std::make_shared<sim::Trace>(
        sim::Trace::load(dir + "/traces/smouldering_fire.csv"));
    constexpr SimTime kIgnitionMark = 30000;
    // Independent baseline: mean of the pre-ignition rows straight from
    // the file.
    double base_co = 0.0;
    std::size_t pre_rows = 0;
    const auto& co_col = fire->column("CO");
    for (std::size_t i = 0; i < fire->times().size(); ++i) {
        if (fire->times()[i] < kIgnitionMark) {
            base_co += co_col[i];
            ++pre_rows;
        }
    }
    base_co /= static_cast<double>(pre_rows);

    sim::Environment env;
    env.bind_trace(detect::SensorKind::CO, fire, "CO", {1}, 0);
    std::optional<SimTime> crossing;
    for (SimTime t = 0; t <= 90000; t += 50) {
        if (env.value(1, detect::SensorKind::CO, t) >= base_co + 150.0) {
            crossing = t;
            break;
        }
    }
    if (!crossing) {
        ok = false;
        os << " no gas-threshold crossing";
    } else {
        const double after_s = (static_cast<double>(*crossing) - kIgnitionMark) / 1000.0;
        if (after_s < 7.0 || after_s > 13.0) {
            ok = false;
            os << " crossing at " << after_s << " s after the mark";
        } else {
            os << " crossing " << after_s << " s after ignition";
        }
    }

    // Mass drop: the 0.8 g threshold trips and samples never leave +/-2 g.
    const sim::Trace quake = sim::Trace::load(dir + "/traces/mass_drop_1kg_40cm.csv");
    detect::ThresholdSet th;
    bool triggered = false;
    bool clipped = true;
    for (std::size_t i = 0; i < quake.times().size(); ++i) {
        const float x = quake.column("X")[i];
        const float y = quake.column("Y")[i];
        const float z = quake.column("Z")[i];
        if (detect::detect_earthquake(x, y, z, th)) {
            triggered = true;
        }
        for (float v : {x, y, z}) {
            if (v < -2.0f || v > 2.0f) {
                clipped = false;
            }
        }
    }
    if (!triggered) {
        ok = false;
        os << " mass-drop trace never trips 0.8 g";
    }
    if (!clipped) {
        ok = false;
        os << " trace samples exceed the 2 g window";
    }
    detail = "fire trace crossing within 10+/-3 s; mass-drop trips at 0.8 g with samples inside "
             "+/-2 g;" +
             os.str();
    return ok;
}

struct Criterion {
    int number;
    const char* title;
    std::function<bool(std::string&)> check;
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {1, "fire consensus (3 of 5)", c1_fire},
        {2, "water weighted veto", c2_water},
        {3, "earthquake unanimity", c3_earthquake},
        {4, "intrusion cases (i)-(vi)", c4_intrusion},
        {5, "node-failure rebalancing", c5_nodefail},
        {6, "communication range", c6_range},
        {7, "power model", c7_power},
        {8, "protocol property suite", c8_properties},
        {9, "trace replay", c9_traces},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::atoi(argv[i]));
    }
    bool all_ok = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && selected.count(c.number) == 0) {
            continue;
        }
        std::string detail;
        const bool ok = c.check(detail);
        all_ok = all_ok && ok;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " C" << c.number << " " << c.title << ": "
                  << detail << "\n";
    }
    return all_ok ? 0 : 1;
}
