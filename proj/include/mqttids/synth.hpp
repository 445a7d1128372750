#ifndef MQTTIDS_SYNTH_HPP
#define MQTTIDS_SYNTH_HPP

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mqttids/common.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/packet.hpp"
#include "mqttids/pcap.hpp"

namespace mqttids {

// Desk-scale scenario generator: a benign substrate (MQTT sensors publishing
// to a broker, a UDP camera feed, seeded link drops) with one attack overlay
// per scenario. Same config, byte-identical capture.
struct ScenarioConfig {
    Scenario scenario = Scenario::normal;
    double duration = 60.0;  // seconds of benign substrate
    int sensor_count = 12;
    std::pair<double, double> sensor_publish_period_range = {0.8, 2.0};
    std::vector<double> drop_rates = {0.002, 0.01, 0.0013};
    std::string attacker_ip = "192.168.0.99";
    std::string broker_ip = "192.168.0.2";
    std::vector<std::string> camera_ips = {"192.168.0.21", "192.168.0.22"};
    uint64_t seed = 1;

    // Extra pacing and sizing knobs; defaults keep captures at desk scale.
    double sensor_session_period = 2.0;   // seconds between a sensor's sessions
    double camera_pps = 30.0;             // camera feed packets per second
    uint16_t mqtt_port = 1883;
    std::pair<uint16_t, uint16_t> scan_port_range = {1, 1024};
    double scan_rate = 100.0;             // probes per second
    uint16_t udp_scan_ports = 500;
    double bf_rate = 8.0;                 // brute-force attempts per second
    double sparta_rate = 10.0;            // ssh connections per second
    int sparta_connections = 200;
};

struct GeneratedCapture {
    std::vector<uint8_t> pcap;
    std::vector<Label> truth;  // one entry per emitted packet, in order
    LabelRuleSet rules;
};

namespace synth_detail {

inline std::array<uint8_t, 4> parse_ipv4(const std::string& s)
{
    std::array<uint8_t, 4> out{};
    int part = 0;
    int value = -1;
    for (char ch : s) {
        if (ch == '.') {
            if (value < 0 || part >= 3) throw InvalidConfig("bad IPv4 address: " + s);
            out[part++] = static_cast<uint8_t>(value);
            value = -1;
        } else if (ch >= '0' && ch <= '9') {
            value = (value < 0 ? 0 : value) * 10 + (ch - '0');
            if (value > 255) throw InvalidConfig("bad IPv4 address: " + s);
        } else {
            throw InvalidConfig("bad IPv4 address: " + s);
        }
    }
    if (part != 3 || value < 0) throw InvalidConfig("bad IPv4 address: " + s);
    out[3] = static_cast<uint8_t>(value);
    return out;
}

inline uint16_t checksum16(const std::vector<uint8_t>& bytes, size_t from, size_t len,
                           uint32_t init = 0)
{
    uint32_t sum = init;
    for (size_t i = 0; i + 1 < len; i += 2)
        sum += static_cast<uint32_t>(bytes[from + i]) << 8 | bytes[from + i + 1];
    if (len & 1) sum += static_cast<uint32_t>(bytes[from + len - 1]) << 8;
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<uint16_t>(~sum);
}

struct TcpFlagBits {
    static constexpr uint8_t fin = 0x01;
    static constexpr uint8_t syn = 0x02;
    static constexpr uint8_t rst = 0x04;
    static constexpr uint8_t psh = 0x08;
    static constexpr uint8_t ack = 0x10;
};

// Ethernet II + IPv4 + TCP/UDP with valid header checksums. MACs derive from
// the last IP octet.
class FrameBuilder {
public:
    static std::vector<uint8_t> frame(const std::string& src_ip, const std::string& dst_ip,
                                      uint8_t proto, const std::vector<uint8_t>& segment,
                                      uint8_t ttl = 64, uint16_t ip_id = 0)
    {
        auto src = parse_ipv4(src_ip);
        auto dst = parse_ipv4(dst_ip);
        uint16_t total_len = static_cast<uint16_t>(20 + segment.size());

        std::vector<uint8_t> f;
        f.reserve(14 + total_len);
        // Ethernet
        for (uint8_t b : {0x02, 0x00, 0x00, 0x00, 0x00}) f.push_back(b);
        f.push_back(dst[3]);
        for (uint8_t b : {0x02, 0x00, 0x00, 0x00, 0x00}) f.push_back(b);
        f.push_back(src[3]);
        f.push_back(0x08);
        f.push_back(0x00);
        // IPv4, DF set
        f.push_back(0x45);
        f.push_back(0x00);
        f.push_back(static_cast<uint8_t>(total_len >> 8));
        f.push_back(static_cast<uint8_t>(total_len & 0xff));
        f.push_back(static_cast<uint8_t>(ip_id >> 8));
        f.push_back(static_cast<uint8_t>(ip_id & 0xff));
        f.push_back(0x40);  // flags: DF
        f.push_back(0x00);
        f.push_back(ttl);
        f.push_back(proto);
        f.push_back(0x00);  // checksum placeholder
        f.push_back(0x00);
        for (uint8_t b : src) f.push_back(b);
        for (uint8_t b : dst) f.push_back(b);
        uint16_t ip_ck = checksum16(f, 14, 20);
        f[24] = static_cast<uint8_t>(ip_ck >> 8);
        f[25] = static_cast<uint8_t>(ip_ck & 0xff);

        size_t seg_off = f.size();
        f.insert(f.end(), segment.begin(), segment.end());

        // Transport checksum over pseudo-header + segment.
        uint32_t pseudo = 0;
        pseudo += static_cast<uint32_t>(src[0]) << 8 | src[1];
        pseudo += static_cast<uint32_t>(src[2]) << 8 | src[3];
        pseudo += static_cast<uint32_t>(dst[0]) << 8 | dst[1];
        pseudo += static_cast<uint32_t>(dst[2]) << 8 | dst[3];
        pseudo += proto;
        pseudo += static_cast<uint32_t>(segment.size());
        size_t ck_off = proto == 6 ? seg_off + 16 : seg_off + 6;
        uint16_t ck = checksum16(f, seg_off, segment.size(), pseudo);
        if (proto == 17 && ck == 0) ck = 0xffff;
        f[ck_off] = static_cast<uint8_t>(ck >> 8);
        f[ck_off + 1] = static_cast<uint8_t>(ck & 0xff);
        return f;
    }

    static std::vector<uint8_t> tcp_segment(uint16_t sport, uint16_t dport, uint32_t seq,
                                            uint32_t ack, uint8_t flags,
                                            const std::vector<uint8_t>& payload)
    {
        std::vector<uint8_t> s;
        s.reserve(20 + payload.size());
        s.push_back(static_cast<uint8_t>(sport >> 8));
        s.push_back(static_cast<uint8_t>(sport & 0xff));
        s.push_back(static_cast<uint8_t>(dport >> 8));
        s.push_back(static_cast<uint8_t>(dport & 0xff));
        for (int shift : {24, 16, 8, 0}) s.push_back(static_cast<uint8_t>(seq >> shift));
        for (int shift : {24, 16, 8, 0}) s.push_back(static_cast<uint8_t>(ack >> shift));
        s.push_back(0x50);  // data offset 5 words
        s.push_back(flags);
        s.push_back(0xfa);  // window 64240
        s.push_back(0xf0);
        s.push_back(0x00);  // checksum placeholder
        s.push_back(0x00);
        s.push_back(0x00);  // urgent pointer
        s.push_back(0x00);
        s.insert(s.end(), payload.begin(), payload.end());
        return s;
    }

    static std::vector<uint8_t> udp_segment(uint16_t sport, uint16_t dport,
                                            const std::vector<uint8_t>& payload)
    {
        uint16_t len = static_cast<uint16_t>(8 + payload.size());
        std::vector<uint8_t> s;
        s.reserve(len);
        s.push_back(static_cast<uint8_t>(sport >> 8));
        s.push_back(static_cast<uint8_t>(sport & 0xff));
        s.push_back(static_cast<uint8_t>(dport >> 8));
        s.push_back(static_cast<uint8_t>(dport & 0xff));
        s.push_back(static_cast<uint8_t>(len >> 8));
        s.push_back(static_cast<uint8_t>(len & 0xff));
        s.push_back(0x00);
        s.push_back(0x00);
        s.insert(s.end(), payload.begin(), payload.end());
        return s;
    }
};

// MQTT v3.1.1 control packet encoders (enough wire realism for parsing).

inline void put_lp_string(std::vector<uint8_t>& out, const std::vector<uint8_t>& s)
{
    out.push_back(static_cast<uint8_t>(s.size() >> 8));
    out.push_back(static_cast<uint8_t>(s.size() & 0xff));
    out.insert(out.end(), s.begin(), s.end());
}

inline std::vector<uint8_t> random_text(Rng& rng, size_t len)
{
    std::vector<uint8_t> s(len);
    for (auto& ch : s) ch = static_cast<uint8_t>('a' + rng.below(26));
    return s;
}

inline std::vector<uint8_t> encode_mqtt_connect(const std::vector<uint8_t>& client_id,
                                                const std::vector<uint8_t>& user,
                                                const std::vector<uint8_t>& pass,
                                                uint16_t keepalive = 60)
{
    std::vector<uint8_t> body;
    put_lp_string(body, {'M', 'Q', 'T', 'T'});
    body.push_back(0x04);  // protocol level 3.1.1
    body.push_back(0xc2);  // username, password, clean session
    body.push_back(static_cast<uint8_t>(keepalive >> 8));
    body.push_back(static_cast<uint8_t>(keepalive & 0xff));
    put_lp_string(body, client_id);
    put_lp_string(body, user);
    put_lp_string(body, pass);

    std::vector<uint8_t> pkt = {0x10};
    auto rl = encode_remaining_length(static_cast<uint32_t>(body.size()));
    pkt.insert(pkt.end(), rl.begin(), rl.end());
    pkt.insert(pkt.end(), body.begin(), body.end());
    return pkt;
}

inline std::vector<uint8_t> encode_mqtt_connack(uint8_t return_code)
{
    return {0x20, 0x02, 0x00, return_code};
}

inline std::vector<uint8_t> encode_mqtt_publish(const std::vector<uint8_t>& topic,
                                                const std::vector<uint8_t>& payload)
{
    std::vector<uint8_t> body;
    put_lp_string(body, topic);
    body.insert(body.end(), payload.begin(), payload.end());

    std::vector<uint8_t> pkt = {0x30};  // QoS 0, no retain
    auto rl = encode_remaining_length(static_cast<uint32_t>(body.size()));
    pkt.insert(pkt.end(), rl.begin(), rl.end());
    pkt.insert(pkt.end(), body.begin(), body.end());
    return pkt;
}

struct Event {
    uint64_t t_us = 0;
    uint64_t order = 0;  // ties broken by creation order
    std::vector<uint8_t> frame;
    std::string src;
    std::string dst;
    bool droppable = false;  // benign traffic passes through a lossy emulator
    int emulator = 0;
};

// Emits one TCP conversation's packets with realistic sequence numbers.
class TcpScript {
public:
    TcpScript(std::vector<Event>& out, uint64_t& order, const std::string& client,
              const std::string& server, uint16_t sport, uint16_t dport, bool droppable,
              int emulator)
        : out_(out), order_(order), client_(client), server_(server), sport_(sport),
          dport_(dport), droppable_(droppable), emulator_(emulator)
    {
    }

    void handshake(uint64_t& t, Rng& rng)
    {
        emit(t, true, TcpFlagBits::syn, {});
        seq_c_ += 1;
        t += 1000 + rng.below(2000);
        emit(t, false, TcpFlagBits::syn | TcpFlagBits::ack, {});
        seq_s_ += 1;
        t += 500 + rng.below(1500);
        emit(t, true, TcpFlagBits::ack, {});
    }

    void client_data(uint64_t t, const std::vector<uint8_t>& payload)
    {
        emit(t, true, TcpFlagBits::psh | TcpFlagBits::ack, payload);
        seq_c_ += payload.size();
    }

    void server_data(uint64_t t, const std::vector<uint8_t>& payload)
    {
        emit(t, false, TcpFlagBits::psh | TcpFlagBits::ack, payload);
        seq_s_ += payload.size();
    }

    void server_ack(uint64_t t) { emit(t, false, TcpFlagBits::ack, {}); }

    void finish(uint64_t& t, Rng& rng)
    {
        emit(t, true, TcpFlagBits::fin | TcpFlagBits::ack, {});
        seq_c_ += 1;
        t += 500 + rng.below(1000);
        emit(t, false, TcpFlagBits::ack, {});
    }

    void client_rst(uint64_t t) { emit(t, true, TcpFlagBits::rst | TcpFlagBits::ack, {}); }

private:
    void emit(uint64_t t, bool from_client, uint8_t flags, const std::vector<uint8_t>& payload)
    {
        auto seg = from_client
                       ? FrameBuilder::tcp_segment(sport_, dport_, seq_c_, seq_s_, flags, payload)
                       : FrameBuilder::tcp_segment(dport_, sport_, seq_s_, seq_c_, flags, payload);
        Event e;
        e.t_us = t;
        e.order = order_++;
        e.src = from_client ? client_ : server_;
        e.dst = from_client ? server_ : client_;
        e.frame = FrameBuilder::frame(e.src, e.dst, 6, seg, 64,
                                      static_cast<uint16_t>(e.order & 0xffff));
        e.droppable = droppable_;
        e.emulator = emulator_;
        out_.push_back(std::move(e));
    }

    std::vector<Event>& out_;
    uint64_t& order_;
    std::string client_, server_;
    uint16_t sport_, dport_;
    bool droppable_;
    int emulator_;
    uint32_t seq_c_ = 1000, seq_s_ = 5000;
};

}  // namespace synth_detail

inline void validate(const ScenarioConfig& cfg)
{
    if (cfg.duration <= 0.0) throw InvalidConfig("duration must be > 0");
    if (cfg.sensor_count < 1) throw InvalidConfig("sensor_count must be >= 1");
    if (cfg.drop_rates.empty()) throw InvalidConfig("need at least one drop rate");
    for (double r : cfg.drop_rates)
        if (r < 0.0 || r >= 1.0) throw InvalidConfig("drop rates must be in [0,1)");
    if (cfg.sensor_publish_period_range.first <= 0.0 ||
        cfg.sensor_publish_period_range.second < cfg.sensor_publish_period_range.first)
        throw InvalidConfig("bad publish period range");
    if (cfg.camera_ips.size() < 2) throw InvalidConfig("camera feed needs two addresses");
    synth_detail::parse_ipv4(cfg.broker_ip);
    synth_detail::parse_ipv4(cfg.attacker_ip);
    for (const auto& ip : cfg.camera_ips) synth_detail::parse_ipv4(ip);
    if (cfg.scenario != Scenario::normal && cfg.attacker_ip == cfg.broker_ip)
        throw InvalidConfig("attacker and broker addresses collide");
}

inline std::string sensor_address(const ScenarioConfig& cfg, int index)
{
    auto broker = synth_detail::parse_ipv4(cfg.broker_ip);
    int last = 100 + index;
    return std::to_string(broker[0]) + "." + std::to_string(broker[1]) + "." +
           std::to_string(broker[2]) + "." + std::to_string(last);
}

inline GeneratedCapture generate_capture(const ScenarioConfig& cfg)
{
    using namespace synth_detail;
    validate(cfg);

    const uint64_t base_us = 1600000000ull * 1000000ull;
    const uint64_t end_us = base_us + static_cast<uint64_t>(cfg.duration * 1e6);
    std::vector<Event> events;
    uint64_t order = 0;

    auto ephemeral = [](Rng& rng) {
        return static_cast<uint16_t>(10000 + rng.below(50000));
    };

    // --- benign substrate: sensors ---------------------------------------
    for (int i = 0; i < cfg.sensor_count; ++i) {
        Rng rng(derive_seed(cfg.seed, 100 + static_cast<uint64_t>(i)));
        std::string addr = sensor_address(cfg, i);
        int emulator = i % static_cast<int>(cfg.drop_rates.size());

        double period = cfg.sensor_publish_period_range.first +
                        rng.unit() * (cfg.sensor_publish_period_range.second -
                                      cfg.sensor_publish_period_range.first);
        uint64_t publish_gap = static_cast<uint64_t>(period * 1e6);
        // Message sizes differ between sensors.
        size_t len_lo = 8 + 4 * static_cast<size_t>(i);
        size_t len_hi = len_lo + 16;

        uint64_t t = base_us + rng.below(static_cast<uint64_t>(
                                   cfg.sensor_session_period * 1e6));
        while (t < end_us) {
            uint64_t session_end =
                t + static_cast<uint64_t>(cfg.sensor_session_period * 1e6);
            TcpScript conn(events, order, addr, cfg.broker_ip, ephemeral(rng), cfg.mqtt_port,
                           true, emulator);
            conn.handshake(t, rng);
            t += 1000 + rng.below(3000);

            auto client_id = random_text(rng, 8 + rng.below(9));
            auto user = random_text(rng, 6 + rng.below(7));
            auto pass = random_text(rng, 6 + rng.below(9));
            conn.client_data(t, encode_mqtt_connect(client_id, user, pass));
            t += 1000 + rng.below(2000);
            conn.server_data(t, encode_mqtt_connack(0x00));
            t += 2000 + rng.below(4000);

            std::vector<uint8_t> topic;
            for (char ch : "sensors/") if (ch) topic.push_back(static_cast<uint8_t>(ch));
            topic.push_back(static_cast<uint8_t>('0' + i / 10));
            topic.push_back(static_cast<uint8_t>('0' + i % 10));

            while (t + publish_gap < session_end && t < end_us) {
                t += publish_gap + rng.below(publish_gap / 4 + 1);
                size_t len = len_lo + rng.below(len_hi - len_lo + 1);
                conn.client_data(t, encode_mqtt_publish(topic, random_text(rng, len)));
                t += 800 + rng.below(1200);
                conn.server_ack(t);
            }
            t = std::max(t + 1000, session_end);
            conn.finish(t, rng);
            t += 5000 + rng.below(20000);
        }
    }

    // --- benign substrate: camera feed ------------------------------------
    {
        Rng rng(derive_seed(cfg.seed, 200));
        const std::string& cam = cfg.camera_ips[0];
        const std::string& sink = cfg.camera_ips[1];
        uint16_t sport = ephemeral(rng);
        uint64_t gap = static_cast<uint64_t>(1e6 / cfg.camera_pps);
        int emulator = static_cast<int>(cfg.drop_rates.size()) - 1;
        uint64_t t = base_us + 2000 + rng.below(5000);
        while (t < end_us) {
            // MPEG-TS over UDP: 7 x 188-byte cells
            std::vector<uint8_t> payload(1316);
            for (auto& b : payload) b = static_cast<uint8_t>(rng.below(256));
            Event e;
            e.t_us = t;
            e.order = order++;
            e.src = cam;
            e.dst = sink;
            e.frame = FrameBuilder::frame(
                cam, sink, 17, FrameBuilder::udp_segment(sport, 1234, payload), 64,
                static_cast<uint16_t>(e.order & 0xffff));
            e.droppable = true;
            e.emulator = emulator;
            events.push_back(std::move(e));
            t += gap - gap / 10 + rng.below(gap / 5 + 1);
        }
    }

    // --- attack overlays ---------------------------------------------------
    Rng atk(derive_seed(cfg.seed, 300));
    switch (cfg.scenario) {
        case Scenario::normal:
            break;

        case Scenario::scan_a: {
            // SYN scan across the port range; the broker answers 1883 with
            // SYN/ACK (then an attacker RST), everything else with RST.
            std::vector<uint16_t> ports;
            for (uint32_t p = cfg.scan_port_range.first; p <= cfg.scan_port_range.second; ++p)
                ports.push_back(static_cast<uint16_t>(p));
            atk.shuffle(ports);
            uint64_t gap = static_cast<uint64_t>(1e6 / cfg.scan_rate);
            uint64_t t = base_us + 3000000 + atk.below(1000000);
            for (uint16_t port : ports) {
                uint16_t sport = ephemeral(atk);
                TcpScript probe(events, order, cfg.attacker_ip, cfg.broker_ip, sport, port,
                                false, 0);
                uint64_t pt = t;
                if (port == cfg.mqtt_port) {
                    probe.handshake(pt, atk);  // SYN, SYN/ACK, ACK
                    pt += 200 + atk.below(400);
                    probe.client_rst(pt);
                } else {
                    // SYN then RST from the closed port
                    Event syn;
                    syn.t_us = t;
                    syn.order = order++;
                    syn.src = cfg.attacker_ip;
                    syn.dst = cfg.broker_ip;
                    syn.frame = FrameBuilder::frame(
                        cfg.attacker_ip, cfg.broker_ip, 6,
                        FrameBuilder::tcp_segment(sport, port, 1000, 0, TcpFlagBits::syn, {}),
                        64, static_cast<uint16_t>(syn.order & 0xffff));
                    events.push_back(std::move(syn));
                    Event rst;
                    rst.t_us = t + 300 + atk.below(700);
                    rst.order = order++;
                    rst.src = cfg.broker_ip;
                    rst.dst = cfg.attacker_ip;
                    rst.frame = FrameBuilder::frame(
                        cfg.broker_ip, cfg.attacker_ip, 6,
                        FrameBuilder::tcp_segment(port, sport, 0, 1001,
                                                  TcpFlagBits::rst | TcpFlagBits::ack, {}),
                        64, static_cast<uint16_t>(rst.order & 0xffff));
                    events.push_back(std::move(rst));
                }
                t += gap / 2 + atk.below(gap + 1);
            }
            break;
        }

        case Scenario::scan_su: {
            // UDP probes met with silence.
            uint64_t gap = static_cast<uint64_t>(1e6 / cfg.scan_rate);
            uint64_t t = base_us + 3000000 + atk.below(1000000);
            for (uint16_t port = 1; port <= cfg.udp_scan_ports; ++port) {
                uint16_t sport = ephemeral(atk);
                Event e;
                e.t_us = t;
                e.order = order++;
                e.src = cfg.attacker_ip;
                e.dst = cfg.broker_ip;
                e.frame = FrameBuilder::frame(cfg.attacker_ip, cfg.broker_ip, 17,
                                              FrameBuilder::udp_segment(sport, port, {}), 64,
                                              static_cast<uint16_t>(e.order & 0xffff));
                events.push_back(std::move(e));
                t += gap / 2 + atk.below(gap + 1);
            }
            break;
        }

        case Scenario::sparta: {
            // Short SSH sessions against the camera feed server.
            uint64_t gap = static_cast<uint64_t>(1e6 / cfg.sparta_rate);
            uint64_t t = base_us + 2000000 + atk.below(1000000);
            for (int c = 0; c < cfg.sparta_connections; ++c) {
                TcpScript conn(events, order, cfg.attacker_ip, cfg.camera_ips[1],
                               ephemeral(atk), 22, false, 0);
                uint64_t pt = t;
                conn.handshake(pt, atk);
                pt += 500 + atk.below(1500);
                conn.client_data(pt, random_text(atk, 20 + atk.below(13)));  // banner
                pt += 500 + atk.below(1500);
                conn.server_data(pt, random_text(atk, 20 + atk.below(21)));
                pt += 800 + atk.below(2000);
                conn.client_data(pt, random_text(atk, 40 + atk.below(21)));  // auth attempt
                pt += 500 + atk.below(1500);
                conn.server_data(pt, random_text(atk, 16 + atk.below(9)));   // reject
                pt += 300 + atk.below(900);
                conn.finish(pt, atk);
                t += gap / 2 + atk.below(gap + 1);
            }
            break;
        }

        case Scenario::mqtt_bf: {
            // Credential guessing: rapid CONNECT attempts that mirror the
            // sensors' wire shape, each rejected by the broker.
            uint64_t gap = static_cast<uint64_t>(1e6 / cfg.bf_rate);
            uint64_t t = base_us + 2000000 + atk.below(1000000);
            while (t < end_us) {
                TcpScript conn(events, order, cfg.attacker_ip, cfg.broker_ip, ephemeral(atk),
                               cfg.mqtt_port, false, 0);
                uint64_t pt = t;
                conn.handshake(pt, atk);
                pt += 1000 + atk.below(3000);
                auto client_id = random_text(atk, 8 + atk.below(9));
                auto user = random_text(atk, 6 + atk.below(7));
                auto pass = random_text(atk, 6 + atk.below(9));
                conn.client_data(pt, encode_mqtt_connect(client_id, user, pass));
                pt += 1000 + atk.below(2000);
                conn.server_data(pt, encode_mqtt_connack(0x05));  // not authorized
                pt += 500 + atk.below(1500);
                conn.finish(pt, atk);
                t += gap / 2 + atk.below(gap + 1);
            }
            break;
        }
    }

    // --- merge, drop, emit ---------------------------------------------------
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.t_us != b.t_us) return a.t_us < b.t_us;
        return a.order < b.order;
    });

    GeneratedCapture out;
    out.rules = LabelRuleSet::for_scenario(
        cfg.scenario, cfg.scenario == Scenario::normal
                          ? std::set<std::string>{}
                          : std::set<std::string>{cfg.attacker_ip});

    Rng drop_rng(derive_seed(cfg.seed, 999));
    std::ostringstream sink(std::ios::binary);
    PcapWriter writer(sink);
    uint64_t last_us = 0;
    for (auto& e : events) {
        if (e.droppable && drop_rng.chance(cfg.drop_rates[static_cast<size_t>(e.emulator)]))
            continue;
        uint64_t t = e.t_us <= last_us ? last_us + 1 : e.t_us;  // strictly increasing
        last_us = t;
        writer.write(static_cast<uint32_t>(t / 1000000ull),
                     static_cast<uint32_t>(t % 1000000ull), e.frame);
        out.truth.push_back(apply_label_rules(e.src, e.dst, out.rules));
    }
    std::string bytes = sink.str();
    out.pcap.assign(bytes.begin(), bytes.end());
    return out;
}

}  // namespace mqttids

#endif  // MQTTIDS_SYNTH_HPP
