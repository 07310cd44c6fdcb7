#include "sentinel/message.hpp"

#include <bit>
#include <cstring>

namespace sentinel {

namespace {

constexpr std::size_t kHeaderBytes = 10;
constexpr std::size_t kRequestBytes = kHeaderBytes;
constexpr std::size_t kResponseBytes = kHeaderBytes + 3 * 4;
constexpr std::size_t kNotificationBytes = kHeaderBytes + 1 + 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

float get_f32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::bit_cast<float>(get_u32(b, at));
}

}  // namespace

const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::VoteRequest:
            return "vote_request";
        case MsgKind::VoteResponse:
            return "vote_response";
        case MsgKind::VoteNotification:
            return "vote_notification";
    }
    return "unknown";
}

std::vector<std::uint8_t> encode_message(const Message& m) {
    std::vector<std::uint8_t> out;
    out.reserve(kResponseBytes);
    out.push_back(static_cast<std::uint8_t>(m.kind));
    put_u16(out, m.sender);
    put_u16(out, m.session.initiator);
    put_u32(out, m.session.seq);
    out.push_back(static_cast<std::uint8_t>(m.scenario));
    switch (m.kind) {
        case MsgKind::VoteRequest:
            break;
        case MsgKind::VoteResponse:
            put_f32(out, m.vote.raw_mean);
            put_f32(out, m.vote.normalized);
            put_f32(out, m.vote.weight);
            break;
        case MsgKind::VoteNotification:
            out.push_back(m.decision ? 1 : 0);
            put_f32(out, m.total_weighted_vote);
            break;
    }
    return out;
}

std::optional<Message> decode_message(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) {
        return std::nullopt;
    }
    const std::uint8_t kind_byte = bytes[0];
    if (kind_byte < 1 || kind_byte > 3) {
        return std::nullopt;
    }
    const std::uint8_t scenario_byte = bytes[9];
    if (scenario_byte >= kScenarioCount) {
        return std::nullopt;
    }

    Message m;
    m.kind = static_cast<MsgKind>(kind_byte);
    m.sender = get_u16(bytes, 1);
    m.session.initiator = get_u16(bytes, 3);
    m.session.seq = get_u32(bytes, 5);
    m.scenario = static_cast<Scenario>(scenario_byte);

    switch (m.kind) {
        case MsgKind::VoteRequest:
            if (bytes.size() != kRequestBytes) {
                return std::nullopt;
            }
            break;
        case MsgKind::VoteResponse:
            if (bytes.size() != kResponseBytes) {
                return std::nullopt;
            }
            m.vote.raw_mean = get_f32(bytes, 10);
            m.vote.normalized = get_f32(bytes, 14);
            m.vote.weight = get_f32(bytes, 18);
            break;
        case MsgKind::VoteNotification:
            if (bytes.size() != kNotificationBytes) {
                return std::nullopt;
            }
            m.decision = bytes[10] != 0;
            m.total_weighted_vote = get_f32(bytes, 11);
            break;
    }
    return m;
}

}  // namespace sentinel
