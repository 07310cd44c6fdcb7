#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "sentinel/message.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

struct ProtocolConfig {
    float node_weight = 1.0f;
    // Required majority per scenario, indexed by Scenario value.
    std::array<float, kScenarioCount> required_majority{2.5f, 2.5f, 2.5f, 5.0f, 2.0f};
    // Accept on total >= majority by default; the strict flag switches the
    // comparison to strictly greater.
    bool strict_majority = false;
    // Rescale responder weights when expected nodes stay silent.
    bool rebalance = true;
    SimTime vote_timeout_ms = 2000;
    SimTime retransmit_interval_ms = 500;
    SimTime idle_listen_ms = 5000;
    SimTime setup_ms = 10000;
    SimTime sleep_interval_ms = 60000;
    std::uint32_t sample_count = 10;
    SimTime sample_window_ms = 1000;

    float majority_for(Scenario s) const {
        return required_majority[static_cast<std::size_t>(s)];
    }
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class DutyState : std::uint8_t { DeepSleep, IdleUptime, ActiveUptime };

const char* duty_name(DutyState s);

enum class WakeReason : std::uint8_t { Timer, SensorThreshold, ExternalMessage };

const char* wake_reason_name(WakeReason r);

struct WakeInfo {
    WakeReason reason = WakeReason::Timer;
    std::optional<Scenario> scenario;  // set for SensorThreshold wakes
};

struct IllegalTransition : std::logic_error {
    using std::logic_error::logic_error;
};
struct EmptySampleWindow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NoRespondents : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct VotingSession {
    enum class State : std::uint8_t { Collecting, Decided };

    SessionId id;
    Scenario scenario = Scenario::Fire;
    Vote own_vote;
    std::map<NodeId, Vote> responses;
    std::set<NodeId> expected;  // known neighbors at session open
    SimTime deadline = 0;
    SimTime next_retransmit = 0;
    State state = State::Collecting;
    bool decision = false;      // valid once Decided
    double total = 0.0;         // weighted sum at decision time
    bool rebalanced = false;    // weights were rescaled before the tally

    bool complete() const;      // every expected node has responded
};

// Mean of the sampling window plus the binary predicate outcome. The
// predicate sees the raw samples and decides whether this node's vote
// counts.
Vote compute_vote(std::span<const float> samples,
                  const std::function<bool(std::span<const float>)>& predicate, float weight);

// Proportionally rescales the responding nodes' weights so their share
// ratios stay fixed while their sum recovers the full network weight.
std::map<NodeId, double> rebalance_weights(const std::map<NodeId, double>& all_weights,
                                           const std::set<NodeId>& responding);

struct TallyResult {
    double total = 0.0;
    bool accepted = false;
    bool rebalanced = false;
};

// Weighted sum of the session's own vote and responses against the
// majority. When rebalancing is on and expected nodes are missing, weights
// are rescaled over the responders (self included) first; `all_weights`
// must then cover self plus every expected node.
TallyResult tally(const VotingSession& s, const std::map<NodeId, double>& all_weights,
                  NodeId self, float majority, bool rebalance, bool strict);

struct SendAction {
    NodeId to = 0;
    Message msg;
    bool retransmit = false;
};

struct Decision {
    SessionId session;
    Scenario scenario = Scenario::Fire;
    bool accepted = false;
    double total = 0.0;
    bool local = false;  // tallied on this node vs. learned via notification
    bool rebalanced = false;
};

enum class IgnoreReason : std::uint8_t { UnknownSession, SessionDecided, DuplicateSender, NotExpected };

const char* ignore_reason_name(IgnoreReason r);

struct IgnoredInput {
    SessionId session;
    NodeId from = 0;
    IgnoreReason reason = IgnoreReason::UnknownSession;
};

struct RecordedResponse {
    SessionId session;
    NodeId from = 0;
};

// Outputs of one state-machine step, to be executed by the harness.
struct Actions {
    std::vector<SendAction> sends;
    std::vector<Decision> decisions;
    std::vector<RecordedResponse> recorded;
    std::vector<IgnoredInput> ignored;
    std::vector<SessionId> cascaded;  // sessions opened in response to a request
};

// Fresh-measurement callback the harness supplies so a vote request can be
// answered with updated sensor readings.
using VoteSource = std::function<Vote(Scenario)>;

// One node's protocol state machine. Strictly sans-IO: every method is a
// synchronous transition producing actions; timers and transmission belong
// to the harness. Plain value type, movable across threads.
class ProtocolNode {
  public:
    ProtocolNode() = default;
    ProtocolNode(NodeId id, ProtocolConfig cfg, std::map<NodeId, double> neighbor_weights);

    NodeId id() const { return id_; }
    const ProtocolConfig& config() const { return cfg_; }
    DutyState duty() const { return duty_; }
    const WakeInfo& last_wake() const { return last_wake_; }
    const std::map<NodeId, double>& neighbor_weights() const { return neighbor_weights_; }

    // Duty-cycle transitions; illegal ones throw IllegalTransition.
    void wake(WakeInfo info, SimTime now);  // DeepSleep -> Idle/Active
    void sleep();                           // Idle/Active -> DeepSleep, only when idle_ready()

    // True when no own session is collecting and no foreign session is
    // still awaiting its notification.
    bool idle_ready() const;

    // Opens a session for a locally detected emergency and fans a
    // VoteRequest out to every neighbor. Returns nullopt while a session
    // for this scenario is already collecting (re-trigger suppression).
    // With zero neighbors the session tallies immediately over the own
    // vote. Requires own_vote.normalized == 1.
    std::optional<SessionId> initiate(Scenario scenario, const Vote& own_vote, SimTime now,
                                      Actions& out);

    // Consumes one delivered message. Requires the node to be awake.
    void handle_message(const Message& m, SimTime now, const VoteSource& fresh_vote,
                        Actions& out);

    // Drives retransmissions and deadlines for all collecting sessions.
    void on_timer(SimTime now, Actions& out);

    // Earliest instant at which on_timer has work to do.
    std::optional<SimTime> next_timer() const;

    const std::map<SessionId, VotingSession>& sessions() const { return sessions_; }
    const std::vector<Decision>& decisions() const { return decisions_; }
    bool has_collecting_session(Scenario s) const;

  private:
    struct ForeignSession {
        Scenario scenario = Scenario::Fire;
        SimTime deadline = 0;
    };

    VotingSession& open_session(Scenario scenario, const Vote& own_vote, SimTime now);
    void finalize(VotingSession& s, Actions& out);
    void record_decision(const VotingSession& s, Actions& out);
    void promote_to_active();

    NodeId id_ = 0;
    ProtocolConfig cfg_;
    std::map<NodeId, double> neighbor_weights_;
    DutyState duty_ = DutyState::DeepSleep;
    WakeInfo last_wake_;
    std::uint32_t seq_counter_ = 0;
    std::map<SessionId, VotingSession> sessions_;
    std::map<SessionId, ForeignSession> foreign_;
    std::vector<Decision> decisions_;
};

}  // namespace sentinel
