#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "helpers.hpp"
#include "mqttids/features.hpp"
#include "mqttids/synth.hpp"

using namespace mqttids;

namespace {

struct ParsedCapture {
    std::vector<ParsedPacket> packets;  // aligned with truth (no frame skipped)
    ParseDiagnostics diag;
};

ParsedCapture reparse(const GeneratedCapture& cap)
{
    std::string bytes(cap.pcap.begin(), cap.pcap.end());
    std::istringstream in(bytes);
    ParsedCapture out;
    PcapReader reader(in);
    RawFrame frame;
    while (reader.next(frame)) {
        ParseResult res = parse_packet(frame, {}, &out.diag);
        REQUIRE(res.ok());  // generator emits only parseable IPv4 frames
        out.packets.push_back(std::move(res.packet));
    }
    return out;
}

ScenarioConfig small_cfg(Scenario s, uint64_t seed = 7, double duration = 10.0)
{
    ScenarioConfig cfg;
    cfg.scenario = s;
    cfg.seed = seed;
    cfg.duration = duration;
    cfg.sensor_count = 4;
    cfg.camera_pps = 10.0;
    return cfg;
}

}  // namespace

TEST_CASE("normal scenario is entirely benign and sensor traffic is mqtt")
{
    auto cap = generate_capture(small_cfg(Scenario::normal, 7, 60.0));
    CHECK(cap.truth.size() > 100);
    for (const auto& lbl : cap.truth) {
        CHECK(lbl.is_attack == 0);
        CHECK(lbl.cls == AttackClass::benign);
    }

    auto parsed = reparse(cap);
    REQUIRE(parsed.packets.size() == cap.truth.size());

    std::set<std::string> sensors;
    ScenarioConfig cfg = small_cfg(Scenario::normal, 7, 60.0);
    for (int i = 0; i < cfg.sensor_count; ++i) sensors.insert(sensor_address(cfg, i));

    size_t sensor_msgs = 0;
    for (const auto& p : parsed.packets) {
        if (!sensors.count(p.ip_src)) continue;
        for (const auto& m : p.mqtt_messages) {
            CHECK((m.message_type == kMqttConnect || m.message_type == kMqttPublish));
            ++sensor_msgs;
        }
    }
    CHECK(sensor_msgs > 50);
}

TEST_CASE("generation is deterministic byte for byte")
{
    ScenarioConfig cfg = small_cfg(Scenario::mqtt_bf);
    auto a = generate_capture(cfg);
    auto b = generate_capture(cfg);
    CHECK(a.pcap == b.pcap);
    CHECK(a.truth.size() == b.truth.size());

    cfg.seed = 8;
    auto c = generate_capture(cfg);
    CHECK(a.pcap != c.pcap);
}

TEST_CASE("brute-force capture carries credentialed connects from the attacker")
{
    ScenarioConfig cfg = small_cfg(Scenario::mqtt_bf, 11, 30.0);
    cfg.bf_rate = 5.0;  // 30 s * 5/s  ->  well over 100 attempts
    auto cap = generate_capture(cfg);
    auto parsed = reparse(cap);

    size_t attacker_connects = 0;
    for (const auto& p : parsed.packets) {
        for (const auto& m : p.mqtt_messages) {
            if (m.message_type == kMqttConnect && p.ip_src == cfg.attacker_ip) {
                CHECK(m.flag_uname);
                CHECK(m.flag_passwd);
                ++attacker_connects;
            }
        }
    }
    CHECK(attacker_connects >= 100);
}

TEST_CASE("ground truth equals re-applying the emitted label rules")
{
    for (Scenario s : {Scenario::normal, Scenario::scan_a, Scenario::scan_su,
                       Scenario::sparta, Scenario::mqtt_bf}) {
        auto cap = generate_capture(small_cfg(s, 13, 8.0));
        auto parsed = reparse(cap);
        REQUIRE(parsed.packets.size() == cap.truth.size());
        for (size_t i = 0; i < parsed.packets.size(); ++i) {
            Label lbl = apply_label_rules(parsed.packets[i].ip_src,
                                          parsed.packets[i].ip_dest, cap.rules);
            CHECK(lbl == cap.truth[i]);
        }
    }
}

TEST_CASE("timestamps strictly increase and headers parse cleanly")
{
    for (Scenario s : {Scenario::normal, Scenario::scan_a, Scenario::mqtt_bf}) {
        auto cap = generate_capture(small_cfg(s, 5, 8.0));
        auto parsed = reparse(cap);
        CHECK(parsed.diag.malformed == 0);
        CHECK(parsed.diag.skipped == 0);
        for (size_t i = 1; i < parsed.packets.size(); ++i)
            CHECK(parsed.packets[i].timestamp > parsed.packets[i - 1].timestamp);
    }
}

TEST_CASE("scan attack packets carry no mqtt payload, brute-force ones do")
{
    auto scan = generate_capture(small_cfg(Scenario::scan_a, 17, 8.0));
    auto parsed_scan = reparse(scan);
    size_t scan_attack_pkts = 0;
    for (size_t i = 0; i < parsed_scan.packets.size(); ++i) {
        if (!scan.truth[i].is_attack) continue;
        ++scan_attack_pkts;
        CHECK(parsed_scan.packets[i].mqtt_messages.empty());
    }
    CHECK(scan_attack_pkts > 100);

    auto bf = generate_capture(small_cfg(Scenario::mqtt_bf, 17, 8.0));
    auto parsed_bf = reparse(bf);
    size_t bf_mqtt_pkts = 0;
    for (size_t i = 0; i < parsed_bf.packets.size(); ++i)
        if (bf.truth[i].is_attack && !parsed_bf.packets[i].mqtt_messages.empty())
            ++bf_mqtt_pkts;
    CHECK(bf_mqtt_pkts > 10);
}

TEST_CASE("scenario shapes")
{
    SECTION("aggressive scan probes a port range and sees replies")
    {
        ScenarioConfig cfg = small_cfg(Scenario::scan_a, 19, 6.0);
        cfg.scan_port_range = {1, 200};
        auto parsed = reparse(generate_capture(cfg));
        std::set<uint16_t> probed;
        size_t replies = 0;
        for (const auto& p : parsed.packets) {
            if (p.ip_src == cfg.attacker_ip && p.transport == Transport::tcp &&
                p.tcp_flags.syn && !p.tcp_flags.ack)
                probed.insert(p.prt_dst);
            if (p.ip_dest == cfg.attacker_ip &&
                (p.tcp_flags.reset || (p.tcp_flags.syn && p.tcp_flags.ack)))
                ++replies;
        }
        CHECK(probed.size() == 200);
        CHECK(replies == 200);
    }
    SECTION("udp scan stays unanswered")
    {
        ScenarioConfig cfg = small_cfg(Scenario::scan_su, 19, 6.0);
        cfg.udp_scan_ports = 150;
        auto cap = generate_capture(cfg);
        auto parsed = reparse(cap);
        size_t probes = 0;
        for (size_t i = 0; i < parsed.packets.size(); ++i) {
            const auto& p = parsed.packets[i];
            if (p.ip_src == cfg.attacker_ip) {
                CHECK(p.transport == Transport::udp);
                ++probes;
            }
            CHECK(p.ip_dest != cfg.attacker_ip);  // nothing answers
        }
        CHECK(probes == 150);
    }
    SECTION("sparta hammers port 22 with short sessions")
    {
        ScenarioConfig cfg = small_cfg(Scenario::sparta, 19, 6.0);
        cfg.sparta_connections = 50;
        auto parsed = reparse(generate_capture(cfg));
        size_t syns_to_22 = 0;
        for (const auto& p : parsed.packets)
            if (p.ip_src == cfg.attacker_ip && p.tcp_flags.syn && !p.tcp_flags.ack &&
                p.prt_dst == 22)
                ++syns_to_22;
        CHECK(syns_to_22 == 50);
    }
}

TEST_CASE("drops thin the benign substrate deterministically")
{
    ScenarioConfig lossless = small_cfg(Scenario::normal, 23, 20.0);
    lossless.drop_rates = {0.0};
    ScenarioConfig lossy = lossless;
    lossy.drop_rates = {0.3, 0.3, 0.3};

    auto full = generate_capture(lossless);
    auto thinned = generate_capture(lossy);
    CHECK(thinned.truth.size() < full.truth.size());
}

TEST_CASE("invalid configs are rejected")
{
    ScenarioConfig cfg = small_cfg(Scenario::normal);
    cfg.duration = 0.0;
    CHECK_THROWS_AS(generate_capture(cfg), InvalidConfig);

    cfg = small_cfg(Scenario::normal);
    cfg.drop_rates = {1.5};
    CHECK_THROWS_AS(generate_capture(cfg), InvalidConfig);

    cfg = small_cfg(Scenario::normal);
    cfg.sensor_count = 0;
    CHECK_THROWS_AS(generate_capture(cfg), InvalidConfig);

    cfg = small_cfg(Scenario::mqtt_bf);
    cfg.attacker_ip = "not-an-ip";
    CHECK_THROWS_AS(generate_capture(cfg), InvalidConfig);

    cfg = small_cfg(Scenario::normal);
    cfg.sensor_publish_period_range = {2.0, 1.0};
    CHECK_THROWS_AS(generate_capture(cfg), InvalidConfig);
}

TEST_CASE("attack packets mimic the benign mqtt wire shape")
{
    // The brute-force CONNECTs must sit inside the benign CONNECT length
    // distribution, otherwise packet-level detection gets an artificial tell.
    ScenarioConfig cfg = small_cfg(Scenario::mqtt_bf, 29, 30.0);
    auto parsed = reparse(generate_capture(cfg));

    std::vector<int> benign_lens, attack_lens;
    for (const auto& p : parsed.packets) {
        for (const auto& m : p.mqtt_messages) {
            if (m.message_type != kMqttConnect) continue;
            if (p.ip_src == cfg.attacker_ip)
                attack_lens.push_back(static_cast<int>(m.message_length));
            else
                benign_lens.push_back(static_cast<int>(m.message_length));
        }
    }
    REQUIRE(!benign_lens.empty());
    REQUIRE(!attack_lens.empty());
    // same draw ranges on both sides; allow sampling slack at the edges
    int bmin = *std::min_element(benign_lens.begin(), benign_lens.end());
    int bmax = *std::max_element(benign_lens.begin(), benign_lens.end());
    for (int len : attack_lens) {
        CHECK(len >= bmin - 5);
        CHECK(len <= bmax + 5);
    }
}
