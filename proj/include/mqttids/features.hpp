#ifndef MQTTIDS_FEATURES_HPP
#define MQTTIDS_FEATURES_HPP

#include <string>
#include <vector>

#include "mqttids/common.hpp"
#include "mqttids/labels.hpp"
#include "mqttids/packet.hpp"
#include "mqttids/table.hpp"

namespace mqttids {

// One per-packet feature row. Column order in CSV output is fixed by
// schema::packet_full().
struct PacketFeatureRecord {
    std::string ip_src;
    std::string ip_dest;
    std::string protocol;
    int ttl = 0;
    int ip_len = 0;
    int ip_flag_df = 0, ip_flag_mf = 0, ip_flag_rb = 0;
    int prt_src = 0, prt_dst = 0;
    int tcp_flag_res = 0, tcp_flag_ns = 0, tcp_flag_cwr = 0, tcp_flag_ecn = 0;
    int tcp_flag_urg = 0, tcp_flag_ack = 0, tcp_flag_push = 0, tcp_flag_reset = 0;
    int tcp_flag_syn = 0, tcp_flag_fin = 0;
    int mqtt_messagetype = 0;    // 0 when the packet carries no MQTT message
    int mqtt_messagelength = 0;
    int mqtt_flag_uname = 0, mqtt_flag_passwd = 0, mqtt_flag_retain = 0;
    int mqtt_flag_qos = 0;
    int mqtt_flag_willflag = 0, mqtt_flag_clean = 0, mqtt_flag_reserved = 0;
    int is_attack = 0;
    AttackClass cls = AttackClass::benign;
};

// Total over ParsedPacket. When a segment carries several MQTT messages the
// first one fills the scalar mqtt_* fields; callers count the rest via
// ParseDiagnostics.
inline PacketFeatureRecord extract_packet_features(const ParsedPacket& pkt,
                                                   const LabelRuleSet& labels)
{
    PacketFeatureRecord r;
    r.ip_src = pkt.ip_src;
    r.ip_dest = pkt.ip_dest;
    r.protocol = pkt.protocol_name;
    r.ttl = pkt.ttl;
    r.ip_len = pkt.ip_len;
    r.ip_flag_df = pkt.ip_flag_df ? 1 : 0;
    r.ip_flag_mf = pkt.ip_flag_mf ? 1 : 0;
    r.ip_flag_rb = pkt.ip_flag_rb ? 1 : 0;
    r.prt_src = pkt.prt_src;
    r.prt_dst = pkt.prt_dst;

    const TcpFlags& f = pkt.tcp_flags;
    r.tcp_flag_res = f.res;
    r.tcp_flag_ns = f.ns;
    r.tcp_flag_cwr = f.cwr;
    r.tcp_flag_ecn = f.ecn;
    r.tcp_flag_urg = f.urg;
    r.tcp_flag_ack = f.ack;
    r.tcp_flag_push = f.push;
    r.tcp_flag_reset = f.reset;
    r.tcp_flag_syn = f.syn;
    r.tcp_flag_fin = f.fin;

    if (!pkt.mqtt_messages.empty()) {
        const MqttMessage& m = pkt.mqtt_messages.front();
        r.mqtt_messagetype = m.message_type;
        r.mqtt_messagelength = static_cast<int>(m.message_length);
        r.mqtt_flag_uname = m.flag_uname;
        r.mqtt_flag_passwd = m.flag_passwd;
        r.mqtt_flag_retain = m.flag_retain;
        r.mqtt_flag_qos = m.flag_qos;
        r.mqtt_flag_willflag = m.flag_willflag;
        r.mqtt_flag_clean = m.flag_clean;
        r.mqtt_flag_reserved = m.flag_reserved;
    }

    Label lbl = apply_label_rules(pkt.ip_src, pkt.ip_dest, labels, pkt.prt_src, pkt.prt_dst,
                                  static_cast<uint8_t>(pkt.transport));
    r.is_attack = lbl.is_attack;
    r.cls = lbl.cls;
    return r;
}

inline FeatureTable packet_feature_table(const std::vector<PacketFeatureRecord>& records,
                                         const std::string& source = "")
{
    FeatureTable t = make_table(FeatureLevel::packet, schema::packet_full());
    t.source = source;
    for (auto& c : t.columns) {
        if (c.kind == ColumnKind::numeric) c.num.reserve(records.size());
        else c.str.reserve(records.size());
    }
    for (const auto& r : records) {
        size_t j = 0;
        t.columns[j++].str.push_back(r.ip_src);
        t.columns[j++].str.push_back(r.ip_dest);
        t.columns[j++].str.push_back(r.protocol);
        for (int v : {r.ttl, r.ip_len, r.ip_flag_df, r.ip_flag_mf, r.ip_flag_rb, r.prt_src,
                      r.prt_dst, r.tcp_flag_res, r.tcp_flag_ns, r.tcp_flag_cwr, r.tcp_flag_ecn,
                      r.tcp_flag_urg, r.tcp_flag_ack, r.tcp_flag_push, r.tcp_flag_reset,
                      r.tcp_flag_syn, r.tcp_flag_fin, r.mqtt_messagetype, r.mqtt_messagelength,
                      r.mqtt_flag_uname, r.mqtt_flag_passwd, r.mqtt_flag_retain, r.mqtt_flag_qos,
                      r.mqtt_flag_willflag, r.mqtt_flag_clean, r.mqtt_flag_reserved})
            t.columns[j++].num.push_back(static_cast<double>(v));
        t.is_attack.push_back(r.is_attack);
        t.class_labels.push_back(to_string(r.cls));
    }
    return t;
}

}  // namespace mqttids

#endif  // MQTTIDS_FEATURES_HPP
