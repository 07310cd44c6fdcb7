#include <random>
#include <vector>

#include "doctest.h"
#include "sentinel/message.hpp"

using namespace sentinel;

namespace {

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
        m.vote.raw_mean = raw(rng);
        m.vote.normalized = (rng() & 1) ? 1.0f : 0.0f;
        m.vote.weight = weight(rng);
    } else if (m.kind == MsgKind::VoteNotification) {
        m.decision = (rng() & 1) != 0;
        m.total_weighted_vote = weight(rng);
    }
    return m;
}

}  // namespace

TEST_CASE("vote request wire layout") {
    Message m;
    m.kind = MsgKind::VoteRequest;
    m.session = {1, 7};
    m.sender = 1;
    m.scenario = Scenario::Fire;

    const auto bytes = encode_message(m);
    REQUIRE(bytes.size() == 10);
    CHECK(bytes[0] == 0x01);
    CHECK(bytes[1] == 0x01);  // sender LE
    CHECK(bytes[2] == 0x00);
    CHECK(bytes[3] == 0x01);  // initiator LE
    CHECK(bytes[4] == 0x00);
    CHECK(bytes[5] == 0x07);  // seq LE
    CHECK(bytes[6] == 0x00);
    CHECK(bytes[7] == 0x00);
    CHECK(bytes[8] == 0x00);
    CHECK(bytes[9] == 0x00);  // fire

    const auto back = decode_message(bytes);
    REQUIRE(back.has_value());
    CHECK(*back == m);
}

TEST_CASE("vote response wire layout ends in weight binary32") {
    Message m;
    m.kind = MsgKind::VoteResponse;
    m.session = {3, 1};
    m.sender = 4;
    m.scenario = Scenario::WaterLeak;
    m.vote = {0.0f, 0.0f, 1.0f};

    const auto bytes = encode_message(m);
    REQUIRE(bytes.size() == 22);
    // binary32(1.0) = 0x3F800000, little-endian
    CHECK(bytes[18] == 0x00);
    CHECK(bytes[19] == 0x00);
    CHECK(bytes[20] == 0x80);
    CHECK(bytes[21] == 0x3F);
}

TEST_CASE("vote notification wire layout") {
    Message m;
    m.kind = MsgKind::VoteNotification;
    m.session = {2, 9};
    m.sender = 2;
    m.scenario = Scenario::Earthquake;
    m.decision = true;
    m.total_weighted_vote = 5.0f;

    const auto bytes = encode_message(m);
    REQUIRE(bytes.size() == 15);
    CHECK(bytes[0] == 0x03);
    CHECK(bytes[9] == 0x03);
    CHECK(bytes[10] == 0x01);
    const auto back = decode_message(bytes);
    REQUIRE(back.has_value());
    CHECK(*back == m);
}

TEST_CASE("decode rejects malformed datagrams") {
    CHECK_FALSE(decode_message({}).has_value());

    std::vector<std::uint8_t> bytes(10, 0);
    bytes[0] = 0x09;  // unknown kind
    CHECK_FALSE(decode_message(bytes).has_value());

    bytes[0] = 0x01;
    bytes[9] = 0x07;  // unknown scenario
    CHECK_FALSE(decode_message(bytes).has_value());

    bytes[9] = 0x00;
    CHECK(decode_message(bytes).has_value());

    // Wrong length for kind.
    bytes.push_back(0);
    CHECK_FALSE(decode_message(bytes).has_value());
    bytes[0] = 0x02;  // response wants 22 bytes
    CHECK_FALSE(decode_message(bytes).has_value());

    // Everything shorter than a header is malformed.
    for (std::size_t len = 0; len < 10; ++len) {
        std::vector<std::uint8_t> shorty(len, 0x01);
        CHECK_FALSE(decode_message(shorty).has_value());
    }
}

TEST_CASE("codec round-trip over randomized messages") {
    std::mt19937_64 rng(0xC0DEC);
    for (int i = 0; i < 5000; ++i) {
        const Message m = random_message(rng);
        const auto bytes = encode_message(m);
        CHECK(bytes.size() <= kMaxDatagramBytes);
        const auto back = decode_message(bytes);
        REQUIRE(back.has_value());
        CHECK(*back == m);
    }
}
