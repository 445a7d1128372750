#ifndef MQTTIDS_PACKET_HPP
#define MQTTIDS_PACKET_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mqttids/common.hpp"
#include "mqttids/pcap.hpp"

namespace mqttids {

// ---------------------------------------------------------------------------
// MQTT control packets
// ---------------------------------------------------------------------------

// Remaining-length varint: 7 bits per byte, continuation in the high bit,
// at most 4 bytes (max value 268435455).
inline constexpr uint32_t kMqttMaxRemainingLength = 268435455;

inline std::vector<uint8_t> encode_remaining_length(uint32_t value)
{
    std::vector<uint8_t> out;
    do {
        uint8_t byte = value % 128;
        value /= 128;
        if (value > 0) byte |= 0x80;
        out.push_back(byte);
    } while (value > 0);
    return out;
}

// Returns {value, bytes consumed}, or nullopt when the encoding is invalid
// (more than 4 continuation bytes) or runs off the buffer.
inline std::optional<std::pair<uint32_t, size_t>> decode_remaining_length(
    const uint8_t* data, size_t len)
{
    uint32_t value = 0;
    uint32_t multiplier = 1;
    for (size_t i = 0; i < 4; ++i) {
        if (i >= len) return std::nullopt;
        uint8_t byte = data[i];
        value += static_cast<uint32_t>(byte & 0x7f) * multiplier;
        if ((byte & 0x80) == 0) return std::make_pair(value, i + 1);
        multiplier *= 128;
    }
    return std::nullopt;  // 4 bytes all with continuation set
}

// Decoded fixed header plus, for CONNECT, the connect-flags byte. The flag
// fields mirror the connect-flags bit layout and stay all-false for every
// other packet type.
struct MqttMessage {
    uint8_t message_type = 0;   // 1..14
    uint32_t message_length = 0;  // decoded remaining length
    bool flag_uname = false;
    bool flag_passwd = false;
    bool flag_retain = false;   // will-retain
    uint8_t flag_qos = 0;       // will-QoS, 0..2
    bool flag_willflag = false;
    bool flag_clean = false;
    bool flag_reserved = false;

    bool operator==(const MqttMessage&) const = default;
};

inline constexpr uint8_t kMqttConnect = 1;
inline constexpr uint8_t kMqttConnack = 2;
inline constexpr uint8_t kMqttPublish = 3;

// Decodes consecutive control packets from one TCP segment payload. Stops at
// the first undecodable byte; a trailing packet cut off by the segment
// boundary is dropped (no cross-segment reassembly). When `split_dropped` is
// given it is incremented once if trailing bytes were discarded.
inline std::vector<MqttMessage> parse_mqtt_stream(const uint8_t* payload, size_t len,
                                                  uint64_t* split_dropped = nullptr)
{
    std::vector<MqttMessage> messages;
    size_t pos = 0;
    while (pos < len) {
        uint8_t type = payload[pos] >> 4;
        if (type < 1 || type > 14) break;
        auto rl = decode_remaining_length(payload + pos + 1, len - pos - 1);
        if (!rl) {
            // A valid type byte whose length bytes run past the segment.
            if (split_dropped) ++*split_dropped;
            break;
        }
        auto [remaining, rl_bytes] = *rl;
        size_t body = pos + 1 + rl_bytes;
        if (remaining > len - body) {
            if (split_dropped) ++*split_dropped;
            break;  // truncated by segment boundary
        }

        MqttMessage m;
        m.message_type = type;
        m.message_length = remaining;
        if (type == kMqttConnect) {
            // Variable header: 2-byte protocol-name length, name, level byte,
            // connect flags. Works for both "MQIsdp" (3.1) and "MQTT" (3.1.1).
            const uint8_t* v = payload + body;
            if (remaining >= 2) {
                uint16_t name_len = static_cast<uint16_t>(v[0]) << 8 | v[1];
                size_t flags_off = 2 + static_cast<size_t>(name_len) + 1;
                if (flags_off < remaining) {
                    uint8_t flags = v[flags_off];
                    m.flag_uname = (flags & 0x80) != 0;
                    m.flag_passwd = (flags & 0x40) != 0;
                    m.flag_retain = (flags & 0x20) != 0;
                    m.flag_qos = (flags >> 3) & 0x03;
                    m.flag_willflag = (flags & 0x04) != 0;
                    m.flag_clean = (flags & 0x02) != 0;
                    m.flag_reserved = (flags & 0x01) != 0;
                }
            }
        }
        messages.push_back(m);
        pos = body + remaining;
    }
    return messages;
}

inline std::vector<MqttMessage> parse_mqtt_stream(const std::vector<uint8_t>& payload,
                                                  uint64_t* split_dropped = nullptr)
{
    return parse_mqtt_stream(payload.data(), payload.size(), split_dropped);
}

// ---------------------------------------------------------------------------
// Frame decoding
// ---------------------------------------------------------------------------

enum class Transport : uint8_t { tcp = 6, udp = 17, other = 0 };

struct TcpFlags {
    bool res = false;  // the three reserved bits, OR-ed
    bool ns = false;
    bool cwr = false;
    bool ecn = false;
    bool urg = false;
    bool ack = false;
    bool push = false;
    bool reset = false;
    bool syn = false;
    bool fin = false;

    bool operator==(const TcpFlags&) const = default;
};

struct ParsedPacket {
    double timestamp = 0.0;
    std::string ip_src;
    std::string ip_dest;
    uint8_t ttl = 0;
    uint16_t ip_len = 0;  // IPv4 total length field
    bool ip_flag_df = false;
    bool ip_flag_mf = false;
    bool ip_flag_rb = false;
    Transport transport = Transport::other;
    uint16_t prt_src = 0;
    uint16_t prt_dst = 0;
    TcpFlags tcp_flags;
    uint32_t payload_len = 0;  // transport payload bytes per header fields
    std::vector<MqttMessage> mqtt_messages;
    std::string protocol_name;  // highest decoded layer
};

enum class ParseOutcome { ok, skip, malformed };

struct ParseResult {
    ParseOutcome outcome = ParseOutcome::skip;
    ParsedPacket packet;  // valid only when outcome == ok

    bool ok() const { return outcome == ParseOutcome::ok; }
};

// Counters surfaced by the extract pipeline.
struct ParseDiagnostics {
    uint64_t packets = 0;
    uint64_t skipped = 0;
    uint64_t malformed = 0;
    uint64_t mqtt_split_dropped = 0;
    uint64_t mqtt_extra_messages = 0;  // messages beyond the first in a segment
};

struct ParserConfig {
    std::set<uint16_t> mqtt_ports = {1883};
};

inline std::string format_ipv4(const uint8_t* a)
{
    return std::to_string(a[0]) + "." + std::to_string(a[1]) + "." +
           std::to_string(a[2]) + "." + std::to_string(a[3]);
}

// Decodes Ethernet/IPv4/TCP|UDP and, for TCP segments touching an MQTT port,
// the embedded MQTT control packets. Non-IPv4 frames yield skip; frames whose
// header length fields disagree with the captured bytes yield malformed.
// Never reads past captured_len.
inline ParseResult parse_packet(const RawFrame& frame, const ParserConfig& cfg = {},
                                ParseDiagnostics* diag = nullptr)
{
    auto fail = [&](ParseOutcome oc) {
        if (diag) {
            if (oc == ParseOutcome::skip) ++diag->skipped;
            else ++diag->malformed;
        }
        return ParseResult{oc, {}};
    };

    const uint8_t* p = frame.data.data();
    size_t n = frame.data.size();
    if (n < 14) return fail(ParseOutcome::skip);  // no Ethernet header

    uint16_t ethertype = static_cast<uint16_t>(p[12]) << 8 | p[13];
    if (ethertype != 0x0800) return fail(ParseOutcome::skip);  // IPv4 only

    const uint8_t* ip = p + 14;
    size_t ip_avail = n - 14;
    if (ip_avail < 20) return fail(ParseOutcome::malformed);
    if ((ip[0] >> 4) != 4) return fail(ParseOutcome::skip);

    size_t ihl = static_cast<size_t>(ip[0] & 0x0f) * 4;
    uint16_t total_len = static_cast<uint16_t>(ip[2]) << 8 | ip[3];
    if (ihl < 20 || ihl > ip_avail || total_len < ihl || total_len > ip_avail)
        return fail(ParseOutcome::malformed);

    ParsedPacket pkt;
    pkt.timestamp = frame.timestamp();
    pkt.ip_src = format_ipv4(ip + 12);
    pkt.ip_dest = format_ipv4(ip + 16);
    pkt.ttl = ip[8];
    pkt.ip_len = total_len;
    pkt.ip_flag_rb = (ip[6] & 0x80) != 0;
    pkt.ip_flag_df = (ip[6] & 0x40) != 0;
    pkt.ip_flag_mf = (ip[6] & 0x20) != 0;

    uint8_t proto = ip[9];
    const uint8_t* tp = ip + ihl;
    size_t tp_avail = total_len - ihl;

    if (proto == 6) {
        if (tp_avail < 20) return fail(ParseOutcome::malformed);
        pkt.transport = Transport::tcp;
        pkt.prt_src = static_cast<uint16_t>(tp[0]) << 8 | tp[1];
        pkt.prt_dst = static_cast<uint16_t>(tp[2]) << 8 | tp[3];
        size_t thl = static_cast<size_t>(tp[12] >> 4) * 4;
        if (thl < 20 || thl > tp_avail) return fail(ParseOutcome::malformed);

        pkt.tcp_flags.res = (tp[12] & 0x0e) != 0;
        pkt.tcp_flags.ns = (tp[12] & 0x01) != 0;
        pkt.tcp_flags.cwr = (tp[13] & 0x80) != 0;
        pkt.tcp_flags.ecn = (tp[13] & 0x40) != 0;
        pkt.tcp_flags.urg = (tp[13] & 0x20) != 0;
        pkt.tcp_flags.ack = (tp[13] & 0x10) != 0;
        pkt.tcp_flags.push = (tp[13] & 0x08) != 0;
        pkt.tcp_flags.reset = (tp[13] & 0x04) != 0;
        pkt.tcp_flags.syn = (tp[13] & 0x02) != 0;
        pkt.tcp_flags.fin = (tp[13] & 0x01) != 0;

        pkt.payload_len = static_cast<uint32_t>(tp_avail - thl);
        pkt.protocol_name = "TCP";

        bool mqtt_port = cfg.mqtt_ports.count(pkt.prt_src) || cfg.mqtt_ports.count(pkt.prt_dst);
        if (mqtt_port && pkt.payload_len > 0) {
            uint64_t* split = diag ? &diag->mqtt_split_dropped : nullptr;
            pkt.mqtt_messages = parse_mqtt_stream(tp + thl, pkt.payload_len, split);
            if (!pkt.mqtt_messages.empty()) pkt.protocol_name = "MQTT";
            if (diag && pkt.mqtt_messages.size() > 1)
                diag->mqtt_extra_messages += pkt.mqtt_messages.size() - 1;
        }
    } else if (proto == 17) {
        if (tp_avail < 8) return fail(ParseOutcome::malformed);
        pkt.transport = Transport::udp;
        pkt.prt_src = static_cast<uint16_t>(tp[0]) << 8 | tp[1];
        pkt.prt_dst = static_cast<uint16_t>(tp[2]) << 8 | tp[3];
        uint16_t udp_len = static_cast<uint16_t>(tp[4]) << 8 | tp[5];
        if (udp_len < 8 || udp_len > tp_avail) return fail(ParseOutcome::malformed);
        pkt.payload_len = static_cast<uint32_t>(udp_len - 8);
        pkt.protocol_name = "UDP";
    } else {
        pkt.transport = Transport::other;
        pkt.payload_len = 0;
        pkt.protocol_name = "OTHER";
    }

    if (diag) ++diag->packets;
    return ParseResult{ParseOutcome::ok, std::move(pkt)};
}

}  // namespace mqttids

#endif  // MQTTIDS_PACKET_HPP
