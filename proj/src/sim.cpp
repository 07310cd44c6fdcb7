#include "sentinel/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sentinel::sim {

using detect::SensorKind;
using power::Stage;

std::string to_json_line(const LogRecord& r) {
    nlohmann::json j;
    j["time_ms"] = r.time_ms;
    if (r.node.has_value()) {
        j["node"] = *r.node;
    } else {
        j["node"] = nullptr;
    }
    j["event"] = r.event;
    j["details"] = r.details;
    return j.dump();
}

std::uint64_t MessageCounts::dropped_total() const {
    std::uint64_t total = 0;
    for (const auto& [reason, n] : dropped) {
        total += n;
    }
    return total;
}

bool RunResult::network_accepted(Scenario s) const {
    return std::any_of(decisions.begin(), decisions.end(),
                       [&](const DecisionRecord& d) { return d.scenario == s && d.accepted; });
}

std::optional<SimTime> RunResult::first_accept_time(Scenario s) const {
    std::optional<SimTime> first;
    for (const auto& d : decisions) {
        if (d.scenario == s && d.accepted && (!first || d.time_ms < *first)) {
            first = d.time_ms;
        }
    }
    return first;
}

std::vector<std::string> RunResult::log_lines() const {
    std::vector<std::string> lines;
    lines.reserve(log.size());
    for (const auto& r : log) {
        lines.push_back(to_json_line(r));
    }
    return lines;
}

void SimulationConfig::validate() const {
    if (topology.nodes().empty()) {
        throw ConfigInvalid("topology needs at least one node");
    }
    if (end_time_ms == 0) {
        throw ConfigInvalid("end_time_ms must be > 0");
    }
    if (detect_interval_ms == 0 || ulp_interval_ms == 0) {
        throw ConfigInvalid("detection and ULP intervals must be > 0");
    }
    try {
        protocol.validate();
        for (const auto& [node, cfg] : protocol_overrides) {
            cfg.validate();
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(e.what());
    }
    try {
        validate_script(script);
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(e.what());
    }
    if (noise.gas_sigma < 0.0 || noise.temp_sigma < 0.0 || noise.accel_sigma < 0.0) {
        throw ConfigInvalid("noise sigmas must be >= 0");
    }
}

namespace {

enum class EvKind : std::uint8_t {
    WakeTimer,
    UptimeStart,
    Deliver,
    IdleCheck,
    DetectTick,
    UlpTick,
    ProtoTimer,
    Script,
};

struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EvKind kind = EvKind::WakeTimer;
    NodeId node = 0;
    std::uint32_t epoch = 0;
    // Deliver payload
    NodeId from = 0;
    std::vector<std::uint8_t> bytes;
    // Script payload
    std::size_t script_index = 0;
    // UptimeStart payload
    WakeInfo wake;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        return a.seq > b.seq;
    }
};

struct NodeRuntime {
    ProtocolNode proto;
    power::EnergyLedger ledger;
    detect::ThresholdSet thresholds;
    std::optional<detect::GasCalibration> cal;
    bool failed = false;
    bool booting = false;
    bool armed = false;
    std::uint32_t epoch = 0;
    SimTime boot_start = 0;
    SimTime uptime_entry = 0;
    Stage stage = Stage::Sleep;
    SimTime stage_mark = 0;
    std::optional<SimTime> proto_timer_at;
    WakeInfo pending_wake;
    // Last decided instant per scenario, for the re-trigger holdoff.
    std::array<std::optional<SimTime>, kScenarioCount> last_decided;
};

class Engine {
  public:
    explicit Engine(const SimulationConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
        env_.co_base = cfg_.co_base;
        env_.odor_base = cfg_.odor_base;
        env_.temp_base_c = cfg_.temp_base_c;
        for (const auto& action : cfg_.script) {
            env_.apply(action);
        }
        for (const auto& spec : cfg_.traces) {
            auto trace = std::make_shared<Trace>(Trace::load(spec.file));
            env_.bind_trace(spec.sensor, std::move(trace), spec.column, spec.nodes,
                            spec.align_at_ms);
        }
        for (const auto& spec : cfg_.topology.nodes()) {
            ProtocolConfig pc = cfg_.protocol;
            auto it = cfg_.protocol_overrides.find(spec.id);
            if (it != cfg_.protocol_overrides.end()) {
                pc = it->second;
            }
            pc.node_weight = static_cast<float>(spec.weight);
            NodeRuntime rt;
            rt.proto = ProtocolNode(spec.id, pc, cfg_.topology.neighbor_weights_of(spec.id));
            rt.thresholds = cfg_.thresholds;
            rt.armed = cfg_.armed_at_start;
            nodes_.emplace(spec.id, std::move(rt));
        }
    }

    RunResult run() {
        for (std::size_t i = 0; i < cfg_.script.size(); ++i) {
            Event ev;
            ev.time = cfg_.script[i].t_ms;
            ev.kind = EvKind::Script;
            ev.script_index = i;
            push(std::move(ev));
        }
        for (const auto& spec : cfg_.topology.nodes()) {
            begin_boot(spec.id, 0, {WakeReason::Timer, std::nullopt});
        }
        while (!queue_.empty() && queue_.top().time <= cfg_.end_time_ms) {
            Event ev = queue_.top();
            queue_.pop();
            dispatch(ev);
        }
        finish();
        result_.end_time_ms = cfg_.end_time_ms;
        result_.seed = cfg_.seed;
        return std::move(result_);
    }

  private:
    void push(Event ev) {
        ev.seq = ++seq_;
        queue_.push(std::move(ev));
    }

    void schedule(SimTime t, EvKind kind, NodeId node, std::uint32_t epoch) {
        Event ev;
        ev.time = t;
        ev.kind = kind;
        ev.node = node;
        ev.epoch = epoch;
        push(std::move(ev));
    }

    void log(SimTime t, std::optional<NodeId> node, std::string event, nlohmann::json details) {
        result_.log.push_back({t, node, std::move(event), std::move(details)});
    }

    double gauss(double sigma) {
        if (sigma <= 0.0) {
            return 0.0;
        }
        return std::normal_distribution<double>(0.0, sigma)(rng_);
    }

    // One sensor reading including noise; accelerometer axes clip to the
    // configured resolution window.
    float sample(NodeId node, SensorKind kind, SimTime t) {
        double v = env_.value(node, kind, t);
        switch (kind) {
            case SensorKind::CO:
            case SensorKind::OdorGas:
                v += gauss(cfg_.noise.gas_sigma);
                break;
            case SensorKind::Temperature:
                v += gauss(cfg_.noise.temp_sigma);
                break;
            case SensorKind::AccelX:
            case SensorKind::AccelY:
            case SensorKind::AccelZ:
                v = detect::clip_accel(static_cast<float>(v + gauss(cfg_.noise.accel_sigma)));
                break;
            default:
                break;
        }
        return static_cast<float>(v);
    }

    // Trailing measurement window [now - sample_window, now].
    std::vector<float> window_samples(NodeRuntime& rt, SensorKind kind, SimTime now) {
        const auto& pc = rt.proto.config();
        const SimTime window = pc.sample_window_ms;
        const SimTime start = now >= window ? now - window : 0;
        const std::uint32_t n = pc.sample_count;
        std::vector<float> out;
        out.reserve(n);
        if (n == 1 || start == now) {
            out.push_back(sample(rt.proto.id(), kind, now));
            return out;
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            const SimTime t = start + (now - start) * i / (n - 1);
            out.push_back(sample(rt.proto.id(), kind, t));
        }
        return out;
    }

    static float max_of(const std::vector<float>& v) {
        return *std::max_element(v.begin(), v.end());
    }

    static float mean_of(const std::vector<float>& v) {
        double sum = 0.0;
        for (float x : v) {
            sum += x;
        }
        return static_cast<float>(sum / static_cast<double>(v.size()));
    }

    // Temperature rise rate over the configured gradient interval, clipped
    // to the simulated past. Too-short spans read as a zero gradient.
    float gradient(NodeRuntime& rt, SimTime now) {
        const auto interval_ms =
            static_cast<SimTime>(std::llround(rt.thresholds.gradient_interval_s * 1000.0));
        const SimTime span = std::min(interval_ms, now);
        if (span < 1000) {
            return 0.0f;
        }
        std::vector<std::pair<double, float>> window;
        constexpr int kPoints = 9;
        for (int i = 0; i < kPoints; ++i) {
            const SimTime t = (now - span) + span * static_cast<SimTime>(i) / (kPoints - 1);
            window.emplace_back(static_cast<double>(t) / 1000.0,
                                sample(rt.proto.id(), SensorKind::Temperature, t));
        }
        return detect::temp_gradient(window, static_cast<float>(span) / 1000.0f);
    }

    // Fresh-measurement vote for one scenario, as used for both local
    // detections and vote-request replies.
    Vote vote_for(NodeRuntime& rt, Scenario scenario, SimTime now) {
        const float weight = rt.proto.config().node_weight;
        switch (scenario) {
            case Scenario::Fire: {
                const auto co = window_samples(rt, SensorKind::CO, now);
                const auto odor = window_samples(rt, SensorKind::OdorGas, now);
                const float odor_mean = mean_of(odor);
                const auto& cal = rt.cal;
                const auto& th = rt.thresholds;
                return compute_vote(
                    co,
                    [&](std::span<const float> co_samples) {
                        if (!cal) {
                            return false;
                        }
                        double sum = 0.0;
                        for (float v : co_samples) {
                            sum += v;
                        }
                        const double co_mean = sum / static_cast<double>(co_samples.size());
                        return co_mean >= cal->baseline_co + th.co_above_baseline &&
                               odor_mean >= cal->baseline_odor + th.odor_above_baseline;
                    },
                    weight);
            }
            case Scenario::GasLeak: {
                const auto odor = window_samples(rt, SensorKind::OdorGas, now);
                const auto& cal = rt.cal;
                const auto& th = rt.thresholds;
                return compute_vote(
                    odor,
                    [&](std::span<const float> odor_samples) {
                        if (!cal) {
                            return false;
                        }
                        double sum = 0.0;
                        for (float v : odor_samples) {
                            sum += v;
                        }
                        const double odor_mean = sum / static_cast<double>(odor_samples.size());
                        return odor_mean >= cal->baseline_odor + th.odor_above_baseline;
                    },
                    weight);
            }
            case Scenario::WaterLeak: {
                const auto probe = window_samples(rt, SensorKind::WaterProbe, now);
                return compute_vote(
                    probe,
                    [](std::span<const float> s) {
                        return std::any_of(s.begin(), s.end(),
                                           [](float v) { return detect::detect_water(v); });
                    },
                    weight);
            }
            case Scenario::Earthquake: {
                const auto x = window_samples(rt, SensorKind::AccelX, now);
                const auto y = window_samples(rt, SensorKind::AccelY, now);
                const auto z = window_samples(rt, SensorKind::AccelZ, now);
                std::vector<float> deviation(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    deviation[i] = std::max({std::fabs(x[i]), std::fabs(y[i]),
                                             std::fabs(z[i] - detect::kGravityG)});
                }
                const float threshold = rt.thresholds.accel_g;
                return compute_vote(
                    deviation,
                    [threshold](std::span<const float> s) {
                        return std::any_of(s.begin(), s.end(),
                                           [&](float v) { return v >= threshold; });
                    },
                    weight);
            }
            case Scenario::Intrusion: {
                const auto pir = window_samples(rt, SensorKind::PIR, now);
                const auto hall = window_samples(rt, SensorKind::Hall, now);
                const bool armed = rt.armed;
                const float hall_any = max_of(hall);
                return compute_vote(
                    pir,
                    [&](std::span<const float> pir_samples) {
                        const float pir_any =
                            *std::max_element(pir_samples.begin(), pir_samples.end());
                        return detect::detect_intrusion(pir_any, hall_any, armed).vote == 1.0f;
                    },
                    weight);
            }
        }
        return Vote{0.0f, 0.0f, weight};
    }

    void flush_stage(NodeRuntime& rt, SimTime now) {
        const double dt_s = static_cast<double>(now - rt.stage_mark) / 1000.0;
        if (rt.stage == Stage::Setup) {
            // The boot block decomposes into the setup stage followed by
            // the Wi-Fi activation burst.
            const double setup_s = static_cast<double>(rt.proto.config().setup_ms) / 1000.0;
            const double setup_part = std::min(dt_s, setup_s);
            const double peak_part =
                std::clamp(dt_s - setup_s, 0.0, cfg_.profile.peak_s);
            rt.ledger.add(Stage::Setup, setup_part, cfg_.profile);
            rt.ledger.add(Stage::WifiPeak, peak_part, cfg_.profile);
        } else {
            rt.ledger.add(rt.stage, dt_s, cfg_.profile);
        }
        rt.stage_mark = now;
    }

    void set_stage(NodeRuntime& rt, Stage s, SimTime now) {
        flush_stage(rt, now);
        rt.stage = s;
    }

    void sync_active_stage(NodeRuntime& rt, SimTime now) {
        if (!rt.booting && rt.proto.duty() == DutyState::ActiveUptime &&
            rt.stage == Stage::Listen) {
            set_stage(rt, Stage::Active, now);
        }
    }

    SimTime boot_duration_ms(const NodeRuntime& rt) const {
        return rt.proto.config().setup_ms +
               static_cast<SimTime>(std::llround(cfg_.profile.peak_s * 1000.0));
    }

    void begin_boot(NodeId id, SimTime now, WakeInfo wake) {
        NodeRuntime& rt = nodes_.at(id);
        set_stage(rt, Stage::Setup, now);
        rt.booting = true;
        rt.boot_start = now;
        rt.pending_wake = wake;
        rt.epoch += 1;
        rt.proto_timer_at.reset();
        Event ev;
        ev.time = now + boot_duration_ms(rt);
        ev.kind = EvKind::UptimeStart;
        ev.node = id;
        ev.epoch = rt.epoch;
        ev.wake = wake;
        push(std::move(ev));
        nlohmann::json details{{"reason", wake_reason_name(wake.reason)}};
        if (wake.scenario) {
            details["scenario"] = scenario_name(*wake.scenario);
        }
        log(now, id, "boot", std::move(details));
    }

    void calibrate(NodeRuntime& rt, SimTime now) {
        std::vector<float> co;
        std::vector<float> odor;
        co.reserve(detect::kGasCalibrationSamples);
        odor.reserve(detect::kGasCalibrationSamples);
        const SimTime start = rt.boot_start;
        const SimTime span = now > start ? now - start : 0;
        for (std::size_t i = 0; i < detect::kGasCalibrationSamples; ++i) {
            const SimTime t =
                start + span * static_cast<SimTime>(i) / (detect::kGasCalibrationSamples - 1);
            co.push_back(sample(rt.proto.id(), SensorKind::CO, t));
            odor.push_back(sample(rt.proto.id(), SensorKind::OdorGas, t));
        }
        rt.cal = detect::calibrate_gas(co, odor);
        log(now, rt.proto.id(), "calibrate",
            {{"baseline_co", rt.cal->baseline_co}, {"baseline_odor", rt.cal->baseline_odor}});
    }

    void transmit(NodeId from, const SendAction& action, SimTime now) {
        const auto bytes = encode_message(action.msg);
        if (bytes.size() > kMaxDatagramBytes) {
            throw std::logic_error("encoded message exceeds the datagram cap");
        }
        result_.messages.sent += 1;
        log(now, from, "send",
            {{"to", action.to},
             {"kind", msg_kind_name(action.msg.kind)},
             {"session", to_string(action.msg.session)},
             {"scenario", scenario_name(action.msg.scenario)},
             {"bytes", bytes.size()},
             {"retransmit", action.retransmit}});
        const LinkModel& link = cfg_.topology.link(from, action.to);
        if (link.loss_prob > 0.0 &&
            std::bernoulli_distribution(link.loss_prob)(rng_)) {
            result_.messages.dropped["loss"] += 1;
            log(now, action.to, "drop",
                {{"reason", "loss"},
                 {"from", from},
                 {"kind", msg_kind_name(action.msg.kind)}});
            return;
        }
        Event ev;
        ev.time = now + link.latency_ms;
        ev.kind = EvKind::Deliver;
        ev.node = action.to;
        ev.from = from;
        ev.bytes = bytes;
        push(std::move(ev));
    }

    void process_actions(NodeRuntime& rt, const Actions& actions, SimTime now) {
        const NodeId id = rt.proto.id();
        for (const auto& c : actions.cascaded) {
            log(now, id, "cascade", {{"session", to_string(c)}});
        }
        for (const auto& r : actions.recorded) {
            log(now, id, "response_recorded",
                {{"session", to_string(r.session)}, {"from", r.from}});
        }
        for (const auto& i : actions.ignored) {
            log(now, id, "ignored",
                {{"session", to_string(i.session)},
                 {"from", i.from},
                 {"reason", ignore_reason_name(i.reason)}});
        }
        for (const auto& d : actions.decisions) {
            result_.decisions.push_back(
                {now, id, d.session, d.scenario, d.accepted, d.total, d.local, d.rebalanced});
            // Accepted emergencies hold off re-alarms; a reject keeps the
            // node watching so new evidence can start a fresh vote.
            if (d.accepted) {
                rt.last_decided[static_cast<std::size_t>(d.scenario)] = now;
            }
            log(now, id, "decide",
                {{"session", to_string(d.session)},
                 {"scenario", scenario_name(d.scenario)},
                 {"decision", d.accepted},
                 {"total", d.total},
                 {"local", d.local},
                 {"rebalanced", d.rebalanced}});
        }
        for (const auto& s : actions.sends) {
            transmit(id, s, now);
        }
        sync_active_stage(rt, now);
    }

    void schedule_proto_timer(NodeRuntime& rt, SimTime now) {
        const auto want = rt.proto.next_timer();
        if (!want) {
            return;
        }
        const SimTime at = std::max(*want, now);
        if (rt.proto_timer_at && *rt.proto_timer_at <= at) {
            return;
        }
        rt.proto_timer_at = at;
        schedule(at, EvKind::ProtoTimer, rt.proto.id(), rt.epoch);
    }

    void maybe_sleep(NodeRuntime& rt, SimTime now) {
        if (rt.failed || rt.booting || rt.proto.duty() == DutyState::DeepSleep) {
            return;
        }
        if (!rt.proto.idle_ready()) {
            return;
        }
        if (now < rt.uptime_entry + rt.proto.config().idle_listen_ms) {
            return;
        }
        set_stage(rt, Stage::Sleep, now);
        rt.proto.sleep();
        rt.epoch += 1;
        rt.proto_timer_at.reset();
        log(now, rt.proto.id(), "sleep",
            {{"next_wake_ms", now + rt.proto.config().sleep_interval_ms}});
        schedule(now + rt.proto.config().sleep_interval_ms, EvKind::WakeTimer, rt.proto.id(),
                 rt.epoch);
        schedule(now + cfg_.ulp_interval_ms, EvKind::UlpTick, rt.proto.id(), rt.epoch);
    }

    bool holdoff_active(const NodeRuntime& rt, Scenario s, SimTime now) const {
        const auto& last = rt.last_decided[static_cast<std::size_t>(s)];
        return last && now < *last + cfg_.retrigger_holdoff_ms;
    }

    void try_initiate(NodeRuntime& rt, Scenario scenario, SimTime now) {
        if (holdoff_active(rt, scenario, now) || rt.proto.has_collecting_session(scenario)) {
            return;
        }
        const Vote vote = vote_for(rt, scenario, now);
        if (vote.normalized != 1.0f) {
            return;
        }
        Actions actions;
        const auto session = rt.proto.initiate(scenario, vote, now, actions);
        if (session) {
            log(now, rt.proto.id(), "initiate",
                {{"session", to_string(*session)},
                 {"scenario", scenario_name(scenario)},
                 {"raw_mean", vote.raw_mean},
                 {"fanout", actions.sends.size()}});
        }
        process_actions(rt, actions, now);
        schedule_proto_timer(rt, now);
    }

    void detect_tick(NodeRuntime& rt, SimTime now) {
        // Gas family: classification picks fire vs. leak via the gradient.
        if (rt.cal) {
            const float co_mean = mean_of(window_samples(rt, SensorKind::CO, now));
            const float odor_mean = mean_of(window_samples(rt, SensorKind::OdorGas, now));
            const float grad = gradient(rt, now);
            const auto klass =
                detect::classify_gas_event(co_mean, odor_mean, rt.cal, grad, rt.thresholds);
            if (klass) {
                try_initiate(rt, *klass, now);
            }
        }
        if (detect::detect_water(sample(rt.proto.id(), SensorKind::WaterProbe, now))) {
            try_initiate(rt, Scenario::WaterLeak, now);
        }
        {
            const float x = sample(rt.proto.id(), SensorKind::AccelX, now);
            const float y = sample(rt.proto.id(), SensorKind::AccelY, now);
            const float z = sample(rt.proto.id(), SensorKind::AccelZ, now);
            const bool instant = detect::detect_earthquake(x, y, z, rt.thresholds);
            // The impact is a transient; the windowed vote keeps seeing it
            // after the instantaneous value has settled.
            if (instant || vote_for(rt, Scenario::Earthquake, now).normalized == 1.0f) {
                try_initiate(rt, Scenario::Earthquake, now);
            }
        }
        {
            const float pir = max_of(window_samples(rt, SensorKind::PIR, now));
            const float hall = max_of(window_samples(rt, SensorKind::Hall, now));
            if (detect::detect_intrusion(pir, hall, rt.armed).initiate) {
                try_initiate(rt, Scenario::Intrusion, now);
            }
        }
    }

    void fail_node(NodeId id, SimTime now) {
        NodeRuntime& rt = nodes_.at(id);
        if (rt.failed) {
            return;
        }
        flush_stage(rt, now);
        rt.failed = true;
        rt.booting = false;
        rt.epoch += 1;
        rt.proto_timer_at.reset();
        // Power loss wipes the protocol state; pending sessions die.
        ProtocolConfig pc = rt.proto.config();
        rt.proto = ProtocolNode(id, pc, cfg_.topology.neighbor_weights_of(id));
        rt.cal.reset();
        log(now, id, "fail", {});
    }

    void revive_node(NodeId id, SimTime now) {
        NodeRuntime& rt = nodes_.at(id);
        if (!rt.failed) {
            return;
        }
        rt.failed = false;
        rt.stage = Stage::Sleep;
        rt.stage_mark = now;
        log(now, id, "revive", {});
        begin_boot(id, now, {WakeReason::Timer, std::nullopt});
    }

    void run_script_action(const ScriptAction& action, SimTime now) {
        nlohmann::json details{{"action", script_action_name(action.body)}};
        log(now, std::nullopt, "script", std::move(details));
        std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, NodeOff>) {
                    fail_node(body.node, now);
                } else if constexpr (std::is_same_v<T, NodeOn>) {
                    revive_node(body.node, now);
                } else if constexpr (std::is_same_v<T, ArmIntrusion>) {
                    for (auto& [id, rt] : nodes_) {
                        rt.armed = body.armed;
                    }
                }
            },
            action.body);
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EvKind::Script:
                run_script_action(cfg_.script[ev.script_index], ev.time);
                return;
            case EvKind::WakeTimer: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch) {
                    return;
                }
                begin_boot(ev.node, ev.time, {WakeReason::Timer, std::nullopt});
                return;
            }
            case EvKind::UptimeStart: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch) {
                    return;
                }
                rt.booting = false;
                rt.uptime_entry = ev.time;
                set_stage(rt,
                          ev.wake.reason == WakeReason::SensorThreshold ? Stage::Active
                                                                        : Stage::Listen,
                          ev.time);
                rt.proto.wake(ev.wake, ev.time);
                if (!rt.cal) {
                    calibrate(rt, ev.time);
                }
                nlohmann::json details{{"reason", wake_reason_name(ev.wake.reason)},
                                       {"duty", duty_name(rt.proto.duty())}};
                if (ev.wake.scenario) {
                    details["scenario"] = scenario_name(*ev.wake.scenario);
                }
                log(ev.time, ev.node, "wake", std::move(details));
                schedule(ev.time + rt.proto.config().idle_listen_ms, EvKind::IdleCheck, ev.node,
                         rt.epoch);
                schedule(ev.time, EvKind::DetectTick, ev.node, rt.epoch);
                return;
            }
            case EvKind::Deliver: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed) {
                    result_.messages.dropped["node_failed"] += 1;
                    log(ev.time, ev.node, "drop", {{"reason", "node_failed"}, {"from", ev.from}});
                    return;
                }
                if (rt.booting || rt.proto.duty() == DutyState::DeepSleep) {
                    result_.messages.dropped["asleep"] += 1;
                    log(ev.time, ev.node, "drop", {{"reason", "asleep"}, {"from", ev.from}});
                    return;
                }
                const auto msg = decode_message(ev.bytes);
                if (!msg) {
                    result_.messages.dropped["malformed"] += 1;
                    log(ev.time, ev.node, "drop", {{"reason", "malformed"}, {"from", ev.from}});
                    return;
                }
                result_.messages.delivered += 1;
                log(ev.time, ev.node, "deliver",
                    {{"from", ev.from},
                     {"kind", msg_kind_name(msg->kind)},
                     {"session", to_string(msg->session)}});
                Actions actions;
                const SimTime now = ev.time;
                rt.proto.handle_message(
                    *msg, now, [&](Scenario s) { return vote_for(rt, s, now); }, actions);
                process_actions(rt, actions, now);
                schedule_proto_timer(rt, now);
                maybe_sleep(rt, now);
                return;
            }
            case EvKind::IdleCheck: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch) {
                    return;
                }
                maybe_sleep(rt, ev.time);
                return;
            }
            case EvKind::DetectTick: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch ||
                    rt.proto.duty() == DutyState::DeepSleep) {
                    return;
                }
                detect_tick(rt, ev.time);
                maybe_sleep(rt, ev.time);
                if (ev.epoch == rt.epoch) {
                    schedule(ev.time + cfg_.detect_interval_ms, EvKind::DetectTick, ev.node,
                             rt.epoch);
                }
                return;
            }
            case EvKind::UlpTick: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch ||
                    rt.proto.duty() != DutyState::DeepSleep) {
                    return;
                }
                const auto hint = ulp_check(rt, ev.time);
                if (hint) {
                    log(ev.time, ev.node, "ulp_trigger", {{"scenario", scenario_name(*hint)}});
                    begin_boot(ev.node, ev.time, {WakeReason::SensorThreshold, *hint});
                } else {
                    schedule(ev.time + cfg_.ulp_interval_ms, EvKind::UlpTick, ev.node, rt.epoch);
                }
                return;
            }
            case EvKind::ProtoTimer: {
                NodeRuntime& rt = nodes_.at(ev.node);
                if (rt.failed || ev.epoch != rt.epoch) {
                    return;
                }
                if (!rt.proto_timer_at || *rt.proto_timer_at != ev.time) {
                    return;  // superseded by an earlier reschedule
                }
                rt.proto_timer_at.reset();
                Actions actions;
                rt.proto.on_timer(ev.time, actions);
                process_actions(rt, actions, ev.time);
                schedule_proto_timer(rt, ev.time);
                maybe_sleep(rt, ev.time);
                return;
            }
        }
    }

    // Threshold watch during deep sleep: instantaneous reads against the
    // preset thresholds; returns the wake scenario hint.
    std::optional<Scenario> ulp_check(NodeRuntime& rt, SimTime now) {
        const NodeId id = rt.proto.id();
        if (rt.cal) {
            const float co = sample(id, SensorKind::CO, now);
            const float odor = sample(id, SensorKind::OdorGas, now);
            const bool co_high = co >= rt.cal->baseline_co + rt.thresholds.co_above_baseline;
            const bool odor_high =
                odor >= rt.cal->baseline_odor + rt.thresholds.odor_above_baseline;
            if (co_high && odor_high) {
                return Scenario::Fire;
            }
            if (odor_high) {
                return Scenario::GasLeak;
            }
            if (co_high) {
                return Scenario::Fire;
            }
        }
        if (detect::detect_water(sample(id, SensorKind::WaterProbe, now))) {
            return Scenario::WaterLeak;
        }
        if (detect::detect_earthquake(sample(id, SensorKind::AccelX, now),
                                      sample(id, SensorKind::AccelY, now),
                                      sample(id, SensorKind::AccelZ, now), rt.thresholds)) {
            return Scenario::Earthquake;
        }
        if (detect::detect_intrusion(sample(id, SensorKind::PIR, now),
                                     sample(id, SensorKind::Hall, now), rt.armed)
                .initiate) {
            return Scenario::Intrusion;
        }
        return std::nullopt;
    }

    void finish() {
        // Messages still on the air when the run ends are accounted as
        // drops so the counts reconcile with the log exactly.
        while (!queue_.empty()) {
            const Event& ev = queue_.top();
            if (ev.kind == EvKind::Deliver) {
                result_.messages.dropped["in_flight_at_end"] += 1;
                log(cfg_.end_time_ms, ev.node, "drop",
                    {{"reason", "in_flight_at_end"}, {"from", ev.from}});
            }
            queue_.pop();
        }
        for (auto& [id, rt] : nodes_) {
            if (!rt.failed) {
                flush_stage(rt, cfg_.end_time_ms);
            }
            nlohmann::json stages;
            for (std::size_t i = 0; i < power::kStageCount; ++i) {
                const auto stage = static_cast<Stage>(i);
                stages[power::stage_name(stage)] = {{"mJ", rt.ledger.stage_mJ(stage)},
                                                    {"s", rt.ledger.stage_s(stage)}};
            }
            log(cfg_.end_time_ms, id, "energy",
                {{"stages", stages},
                 {"total_mJ", rt.ledger.total_mJ()},
                 {"average_mW", rt.ledger.average_mW()}});
            result_.energy[id] = rt.ledger;
        }
    }

    SimulationConfig cfg_;
    Environment env_;
    std::mt19937_64 rng_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t seq_ = 0;
    std::map<NodeId, NodeRuntime> nodes_;
    RunResult result_;
};

}  // namespace

RunResult run(const SimulationConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

double RangeResult::mean_received(NodeId receiver, NodeId transmitter) const {
    double sum = 0.0;
    for (const auto& loop : loop_counts) {
        auto it = loop.find({receiver, transmitter});
        sum += it == loop.end() ? 0 : it->second;
    }
    return loop_counts.empty() ? 0.0 : sum / static_cast<double>(loop_counts.size());
}

int RangeResult::min_received(NodeId receiver, NodeId transmitter) const {
    int min = std::numeric_limits<int>::max();
    for (const auto& loop : loop_counts) {
        auto it = loop.find({receiver, transmitter});
        min = std::min(min, it == loop.end() ? 0 : it->second);
    }
    return loop_counts.empty() ? 0 : min;
}

RangeResult range_test(const RangeSpec& spec) {
    if (spec.transmitters.empty() || spec.receivers.empty()) {
        throw ConfigInvalid("range test needs transmitters and receivers");
    }
    if (spec.messages_per_loop <= 0 || spec.loops <= 0) {
        throw ConfigInvalid("range test needs positive message and loop counts");
    }
    std::mt19937_64 rng(spec.seed);
    RangeResult result;
    result.loop_counts.resize(static_cast<std::size_t>(spec.loops));
    for (auto& loop : result.loop_counts) {
        for (int i = 0; i < spec.messages_per_loop; ++i) {
            for (NodeId tx : spec.transmitters) {
                for (NodeId rx : spec.receivers) {
                    if (rx == tx) {
                        continue;
                    }
                    const LinkModel& link = spec.topology.link(tx, rx);
                    const bool lost =
                        link.loss_prob > 0.0 && std::bernoulli_distribution(link.loss_prob)(rng);
                    if (!lost) {
                        loop[{rx, tx}] += 1;
                    }
                }
            }
        }
    }
    return result;
}

}  // namespace sentinel::sim
