#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel {

enum class MsgKind : std::uint8_t {
    VoteRequest = 1,
    VoteResponse = 2,
    VoteNotification = 3,
};

const char* msg_kind_name(MsgKind k);

// One protocol datagram. Payload fields beyond the common header are only
// meaningful for the kind that carries them; encode/decode keep the unused
// ones zeroed so whole-struct equality works.
struct Message {
    MsgKind kind = MsgKind::VoteRequest;
    SessionId session;
    NodeId sender = 0;
    Scenario scenario = Scenario::Fire;

    // VoteResponse payload
    Vote vote;

    // VoteNotification payload
    bool decision = false;
    float total_weighted_vote = 0.0f;

    bool operator==(const Message&) const = default;
};

// Hard cap of the modeled radio datagram payload.
inline constexpr std::size_t kMaxDatagramBytes = 250;

// Wire layout, little-endian throughout:
//   byte 0      kind (1/2/3)
//   bytes 1-2   sender id
//   bytes 3-4   session initiator
//   bytes 5-8   session seq
//   byte 9      scenario
//   VoteResponse appends raw_mean, normalized, weight as binary32 (22 total)
//   VoteNotification appends decision byte and total as binary32 (15 total)
std::vector<std::uint8_t> encode_message(const Message& m);

// Inverse of encode_message on its image. Returns nullopt for corrupted
// datagrams (wrong length for the kind, unknown kind or scenario byte);
// callers drop those silently.
std::optional<Message> decode_message(std::span<const std::uint8_t> bytes);

}  // namespace sentinel
