#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "mqttids/features.hpp"

using namespace mqttids;

namespace {

ParsedPacket udp_packet()
{
    ParsedPacket p;
    p.timestamp = 3.0;
    p.ip_src = "192.168.0.21";
    p.ip_dest = "192.168.0.22";
    p.ttl = 64;
    p.ip_len = 1344;
    p.transport = Transport::udp;
    p.prt_src = 9000;
    p.prt_dst = 1234;
    p.payload_len = 1316;
    p.protocol_name = "UDP";
    return p;
}

ParsedPacket connect_packet(const std::string& src)
{
    ParsedPacket p;
    p.timestamp = 4.0;
    p.ip_src = src;
    p.ip_dest = "192.168.0.2";
    p.ttl = 64;
    p.ip_len = 90;
    p.transport = Transport::tcp;
    p.prt_src = 40000;
    p.prt_dst = 1883;
    p.tcp_flags.push = true;
    p.tcp_flags.ack = true;
    p.payload_len = 50;
    MqttMessage m;
    m.message_type = 1;
    m.message_length = 48;
    m.flag_uname = true;
    m.flag_passwd = true;
    m.flag_clean = true;
    p.mqtt_messages.push_back(m);
    p.protocol_name = "MQTT";
    return p;
}

}  // namespace

TEST_CASE("udp packet row has zero tcp and mqtt fields")
{
    auto r = extract_packet_features(udp_packet(),
                                     LabelRuleSet::for_scenario(Scenario::normal, {}));
    CHECK(r.protocol == "UDP");
    CHECK(r.tcp_flag_syn == 0);
    CHECK(r.tcp_flag_ack == 0);
    CHECK(r.tcp_flag_push == 0);
    CHECK(r.mqtt_messagetype == 0);
    CHECK(r.mqtt_messagelength == 0);
    CHECK(r.mqtt_flag_uname == 0);
    CHECK(r.is_attack == 0);
    CHECK(r.cls == AttackClass::benign);
}

TEST_CASE("mqtt connect row carries the credential flags")
{
    auto r = extract_packet_features(connect_packet("192.168.0.101"),
                                     LabelRuleSet::for_scenario(Scenario::normal, {}));
    CHECK(r.protocol == "MQTT");
    CHECK(r.mqtt_messagetype == 1);
    CHECK(r.mqtt_messagelength == 48);
    CHECK(r.mqtt_flag_uname == 1);
    CHECK(r.mqtt_flag_passwd == 1);
    CHECK(r.mqtt_flag_clean == 1);
    CHECK(r.mqtt_flag_qos == 0);
    CHECK(r.prt_dst == 1883);
    CHECK(r.tcp_flag_push == 1);
}

TEST_CASE("attacker address labels the row with the scenario class")
{
    auto rules = LabelRuleSet::for_scenario(Scenario::mqtt_bf, {"192.168.0.99"});
    auto hit = extract_packet_features(connect_packet("192.168.0.99"), rules);
    CHECK(hit.is_attack == 1);
    CHECK(hit.cls == AttackClass::mqtt_bf);

    auto miss = extract_packet_features(connect_packet("192.168.0.101"), rules);
    CHECK(miss.is_attack == 0);
    CHECK(miss.cls == AttackClass::benign);
}

TEST_CASE("first message wins when a segment carries several")
{
    ParsedPacket p = connect_packet("192.168.0.101");
    MqttMessage second;
    second.message_type = 3;
    second.message_length = 10;
    p.mqtt_messages.push_back(second);
    auto r = extract_packet_features(p, LabelRuleSet::for_scenario(Scenario::normal, {}));
    CHECK(r.mqtt_messagetype == 1);
    CHECK(r.mqtt_messagelength == 48);
}

TEST_CASE("packet table columns follow the canonical order")
{
    std::vector<PacketFeatureRecord> rows = {
        extract_packet_features(udp_packet(), LabelRuleSet::for_scenario(Scenario::normal, {}))};
    FeatureTable t = packet_feature_table(rows);
    REQUIRE(t.n_columns() == 29);
    CHECK(t.columns[0].name == "ip_src");
    CHECK(t.columns[1].name == "ip_dest");
    CHECK(t.columns[2].name == "protocol");
    CHECK(t.columns[3].name == "ttl");
    CHECK(t.columns[19].name == "tcp_flag_fin");
    CHECK(t.columns[20].name == "mqtt_messagetype");
    CHECK(t.columns[21].name == "mqtt_messagelength");
    CHECK(t.columns[24].name == "mqtt_flag_retain");
    CHECK(t.columns[25].name == "mqtt_flag_qos");
    CHECK(t.columns[26].name == "mqtt_flag_willflag");
    CHECK(t.columns[28].name == "mqtt_flag_reserved");
    CHECK(t.n_rows() == 1);

    std::ostringstream csv;
    write_feature_csv(t, csv);
    CHECK(csv.str().substr(0, 31) == "ip_src,ip_dest,protocol,ttl,ip_");
    CHECK(csv.str().find(",is_attack,class\n") != std::string::npos);
}

TEST_CASE("is_attack zero exactly when the class is benign")
{
    testutil::Rng rng(5);
    auto rules = LabelRuleSet::for_scenario(Scenario::sparta, {"10.0.0.4"});
    auto packets = testutil::random_stream(rng, 400);
    size_t attacks = 0;
    for (const auto& p : packets) {
        auto r = extract_packet_features(p, rules);
        CHECK((r.is_attack == 0) == (r.cls == AttackClass::benign));
        attacks += r.is_attack;
    }
    // the random pool contains the attacker address, so both sides occur
    CHECK(attacks > 0);
    CHECK(attacks < packets.size());
}

TEST_CASE("identical packets and rules produce byte-identical csv")
{
    testutil::Rng rng(17);
    auto rules = LabelRuleSet::for_scenario(Scenario::scan_a, {"10.0.0.2"});
    auto packets = testutil::random_stream(rng, 300);
    std::vector<PacketFeatureRecord> rows;
    for (const auto& p : packets) rows.push_back(extract_packet_features(p, rules));

    std::ostringstream a, b;
    write_feature_csv(packet_feature_table(rows), a);
    write_feature_csv(packet_feature_table(rows), b);
    CHECK(a.str() == b.str());
    CHECK(packet_feature_table(rows).n_rows() == packets.size());
}
