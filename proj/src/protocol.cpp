#include "sentinel/protocol.hpp"

#include <algorithm>
#include <numeric>

namespace sentinel {

void ProtocolConfig::validate() const {
    if (node_weight < 0.0f) {
        throw std::invalid_argument("node_weight must be >= 0");
    }
    for (std::size_t i = 0; i < kScenarioCount; ++i) {
        if (required_majority[i] <= 0.0f) {
            throw std::invalid_argument(std::string("required_majority.") +
                                        scenario_name(static_cast<Scenario>(i)) +
                                        " must be > 0");
        }
    }
    if (retransmit_interval_ms >= vote_timeout_ms) {
        throw std::invalid_argument("retransmit_interval_ms must be < vote_timeout_ms");
    }
    if (retransmit_interval_ms == 0) {
        throw std::invalid_argument("retransmit_interval_ms must be > 0");
    }
    if (sample_count == 0) {
        throw std::invalid_argument("sample_count must be > 0");
    }
}

const char* duty_name(DutyState s) {
    switch (s) {
        case DutyState::DeepSleep:
            return "deep_sleep";
        case DutyState::IdleUptime:
            return "idle_uptime";
        case DutyState::ActiveUptime:
            return "active_uptime";
    }
    return "unknown";
}

const char* wake_reason_name(WakeReason r) {
    switch (r) {
        case WakeReason::Timer:
            return "timer";
        case WakeReason::SensorThreshold:
            return "sensor_threshold";
        case WakeReason::ExternalMessage:
            return "external_message";
    }
    return "unknown";
}

const char* ignore_reason_name(IgnoreReason r) {
    switch (r) {
        case IgnoreReason::UnknownSession:
            return "unknown_session";
        case IgnoreReason::SessionDecided:
            return "session_decided";
        case IgnoreReason::DuplicateSender:
            return "duplicate_sender";
        case IgnoreReason::NotExpected:
            return "not_expected";
    }
    return "unknown";
}

bool VotingSession::complete() const {
    return std::all_of(expected.begin(), expected.end(),
                       [&](NodeId n) { return responses.count(n) != 0; });
}

Vote compute_vote(std::span<const float> samples,
                  const std::function<bool(std::span<const float>)>& predicate, float weight) {
    if (samples.empty()) {
        throw EmptySampleWindow("vote computation needs a non-empty sample window");
    }
    const double sum = std::accumulate(samples.begin(), samples.end(), 0.0);
    Vote v;
    v.raw_mean = static_cast<float>(sum / static_cast<double>(samples.size()));
    v.normalized = predicate(samples) ? 1.0f : 0.0f;
    v.weight = weight;
    return v;
}

std::map<NodeId, double> rebalance_weights(const std::map<NodeId, double>& all_weights,
                                           const std::set<NodeId>& responding) {
    if (responding.empty()) {
        throw NoRespondents("cannot rebalance over an empty responder set");
    }
    double total = 0.0;
    for (const auto& [node, w] : all_weights) {
        total += w;
    }
    double responding_total = 0.0;
    for (NodeId n : responding) {
        auto it = all_weights.find(n);
        if (it == all_weights.end()) {
            throw std::invalid_argument("responder " + std::to_string(n) +
                                        " missing from weight map");
        }
        responding_total += it->second;
    }
    // All-zero responders cannot be scaled back to the total.
    const double scale = responding_total > 0.0 ? total / responding_total : 0.0;
    std::map<NodeId, double> scaled;
    for (NodeId n : responding) {
        scaled[n] = all_weights.at(n) * scale;
    }
    return scaled;
}

TallyResult tally(const VotingSession& s, const std::map<NodeId, double>& all_weights,
                  NodeId self, float majority, bool rebalance, bool strict) {
    TallyResult r;
    const bool missing = !s.complete();
    if (rebalance && missing) {
        std::set<NodeId> responding{self};
        for (const auto& [node, vote] : s.responses) {
            responding.insert(node);
        }
        const auto scaled = rebalance_weights(all_weights, responding);
        r.total += static_cast<double>(s.own_vote.normalized) * scaled.at(self);
        for (const auto& [node, vote] : s.responses) {
            r.total += static_cast<double>(vote.normalized) * scaled.at(node);
        }
        r.rebalanced = true;
    } else {
        r.total = static_cast<double>(s.own_vote.normalized) * s.own_vote.weight;
        for (const auto& [node, vote] : s.responses) {
            r.total += static_cast<double>(vote.normalized) * vote.weight;
        }
    }
    r.accepted = strict ? r.total > majority : r.total >= majority;
    return r;
}

ProtocolNode::ProtocolNode(NodeId id, ProtocolConfig cfg, std::map<NodeId, double> neighbor_weights)
    : id_(id), cfg_(cfg), neighbor_weights_(std::move(neighbor_weights)) {
    cfg_.validate();
}

void ProtocolNode::wake(WakeInfo info, SimTime now) {
    (void)now;
    if (duty_ != DutyState::DeepSleep) {
        throw IllegalTransition("wake from " + std::string(duty_name(duty_)));
    }
    switch (info.reason) {
        case WakeReason::Timer:
            duty_ = DutyState::IdleUptime;
            break;
        case WakeReason::SensorThreshold:
            duty_ = DutyState::ActiveUptime;
            break;
        case WakeReason::ExternalMessage:
            throw IllegalTransition("sleeping nodes cannot wake on a message");
    }
    last_wake_ = info;
}

void ProtocolNode::sleep() {
    if (duty_ == DutyState::DeepSleep) {
        throw IllegalTransition("sleep while already sleeping");
    }
    if (!idle_ready()) {
        throw IllegalTransition("sleep with open sessions");
    }
    duty_ = DutyState::DeepSleep;
}

bool ProtocolNode::idle_ready() const {
    if (!foreign_.empty()) {
        return false;
    }
    return std::all_of(sessions_.begin(), sessions_.end(), [](const auto& kv) {
        return kv.second.state == VotingSession::State::Decided;
    });
}

bool ProtocolNode::has_collecting_session(Scenario s) const {
    return std::any_of(sessions_.begin(), sessions_.end(), [&](const auto& kv) {
        return kv.second.scenario == s && kv.second.state == VotingSession::State::Collecting;
    });
}

void ProtocolNode::promote_to_active() {
    if (duty_ == DutyState::IdleUptime) {
        duty_ = DutyState::ActiveUptime;
    }
}

VotingSession& ProtocolNode::open_session(Scenario scenario, const Vote& own_vote, SimTime now) {
    SessionId id{id_, ++seq_counter_};
    VotingSession s;
    s.id = id;
    s.scenario = scenario;
    s.own_vote = own_vote;
    for (const auto& [node, weight] : neighbor_weights_) {
        s.expected.insert(node);
    }
    s.deadline = now + cfg_.vote_timeout_ms;
    s.next_retransmit = now + cfg_.retransmit_interval_ms;
    auto [it, inserted] = sessions_.emplace(id, std::move(s));
    return it->second;
}

std::optional<SessionId> ProtocolNode::initiate(Scenario scenario, const Vote& own_vote,
                                                SimTime now, Actions& out) {
    if (duty_ == DutyState::DeepSleep) {
        throw IllegalTransition("initiate while sleeping");
    }
    if (own_vote.normalized != 1.0f) {
        throw std::invalid_argument("voting is initiated only on a positive local vote");
    }
    if (has_collecting_session(scenario)) {
        return std::nullopt;  // DuplicateSession: re-trigger suppression
    }
    promote_to_active();
    VotingSession& s = open_session(scenario, own_vote, now);
    Message req;
    req.kind = MsgKind::VoteRequest;
    req.session = s.id;
    req.sender = id_;
    req.scenario = scenario;
    for (NodeId neighbor : s.expected) {
        out.sends.push_back({neighbor, req, false});
    }
    if (s.expected.empty()) {
        finalize(s, out);
    }
    return s.id;
}

void ProtocolNode::handle_message(const Message& m, SimTime now, const VoteSource& fresh_vote,
                                  Actions& out) {
    if (duty_ == DutyState::DeepSleep) {
        throw IllegalTransition("message delivered to a sleeping node");
    }
    promote_to_active();
    switch (m.kind) {
        case MsgKind::VoteRequest: {
            const Vote vote = fresh_vote(m.scenario);
            Message resp;
            resp.kind = MsgKind::VoteResponse;
            resp.session = m.session;
            resp.sender = id_;
            resp.scenario = m.scenario;
            resp.vote = vote;
            out.sends.push_back({m.sender, resp, false});
            // Stay awake until the initiator announces the outcome.
            auto [fit, fresh] = foreign_.try_emplace(m.session);
            if (fresh) {
                fit->second = ForeignSession{m.scenario, now + cfg_.vote_timeout_ms};
            }
            if (vote.normalized == 1.0f && !has_collecting_session(m.scenario)) {
                if (auto id = initiate(m.scenario, vote, now, out)) {
                    out.cascaded.push_back(*id);
                }
            }
            break;
        }
        case MsgKind::VoteResponse: {
            auto it = sessions_.find(m.session);
            if (it == sessions_.end()) {
                out.ignored.push_back({m.session, m.sender, IgnoreReason::UnknownSession});
                return;
            }
            VotingSession& s = it->second;
            if (s.state == VotingSession::State::Decided) {
                out.ignored.push_back({m.session, m.sender, IgnoreReason::SessionDecided});
                return;
            }
            if (s.expected.count(m.sender) == 0) {
                out.ignored.push_back({m.session, m.sender, IgnoreReason::NotExpected});
                return;
            }
            if (!s.responses.emplace(m.sender, m.vote).second) {
                out.ignored.push_back({m.session, m.sender, IgnoreReason::DuplicateSender});
                return;
            }
            out.recorded.push_back({m.session, m.sender});
            if (s.complete()) {
                finalize(s, out);
            }
            break;
        }
        case MsgKind::VoteNotification: {
            const Decision d{m.session, m.scenario, m.decision,
                             static_cast<double>(m.total_weighted_vote), false, false};
            decisions_.push_back(d);
            out.decisions.push_back(d);
            auto it = sessions_.find(m.session);
            if (it != sessions_.end() && it->second.state == VotingSession::State::Collecting) {
                it->second.state = VotingSession::State::Decided;
                it->second.decision = m.decision;
                it->second.total = m.total_weighted_vote;
            }
            foreign_.erase(m.session);
            break;
        }
    }
}

void ProtocolNode::finalize(VotingSession& s, Actions& out) {
    std::map<NodeId, double> all_weights = neighbor_weights_;
    all_weights[id_] = s.own_vote.weight;
    const TallyResult result = tally(s, all_weights, id_, cfg_.majority_for(s.scenario),
                                     cfg_.rebalance, cfg_.strict_majority);
    s.state = VotingSession::State::Decided;
    s.decision = result.accepted;
    s.total = result.total;
    s.rebalanced = result.rebalanced;
    record_decision(s, out);

    Message notify;
    notify.kind = MsgKind::VoteNotification;
    notify.session = s.id;
    notify.sender = id_;
    notify.scenario = s.scenario;
    notify.decision = s.decision;
    notify.total_weighted_vote = static_cast<float>(s.total);
    for (const auto& [node, weight] : neighbor_weights_) {
        out.sends.push_back({node, notify, false});
    }
}

void ProtocolNode::record_decision(const VotingSession& s, Actions& out) {
    Decision d{s.id, s.scenario, s.decision, s.total, true, s.rebalanced};
    decisions_.push_back(d);
    out.decisions.push_back(d);
}

void ProtocolNode::on_timer(SimTime now, Actions& out) {
    for (auto& [id, s] : sessions_) {
        if (s.state != VotingSession::State::Collecting) {
            continue;
        }
        if (now >= s.deadline) {
            finalize(s, out);
            continue;
        }
        if (now >= s.next_retransmit) {
            Message req;
            req.kind = MsgKind::VoteRequest;
            req.session = s.id;
            req.sender = id_;
            req.scenario = s.scenario;
            for (NodeId neighbor : s.expected) {
                if (s.responses.count(neighbor) == 0) {
                    out.sends.push_back({neighbor, req, true});
                }
            }
            while (s.next_retransmit <= now) {
                s.next_retransmit += cfg_.retransmit_interval_ms;
            }
        }
    }
    for (auto it = foreign_.begin(); it != foreign_.end();) {
        if (now >= it->second.deadline) {
            it = foreign_.erase(it);
        } else {
            ++it;
        }
    }
}

std::optional<SimTime> ProtocolNode::next_timer() const {
    std::optional<SimTime> next;
    auto consider = [&](SimTime t) {
        if (!next || t < *next) {
            next = t;
        }
    };
    for (const auto& [id, s] : sessions_) {
        if (s.state != VotingSession::State::Collecting) {
            continue;
        }
        consider(s.deadline);
        if (s.next_retransmit < s.deadline) {
            consider(s.next_retransmit);
        }
    }
    for (const auto& [id, f] : foreign_) {
        consider(f.deadline);
    }
    return next;
}

}  // namespace sentinel
